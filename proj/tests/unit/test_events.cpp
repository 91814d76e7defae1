#include <gtest/gtest.h>

#include <sstream>

#include "evrep/error.hpp"
#include "evrep/events.hpp"
#include "random_stream.hpp"

using namespace evrep;
using evrep::testing::random_stream;

namespace {

EventStream make(Geometry g, std::vector<Event> events, Micros t0, Micros t1) {
  EventStream s;
  s.geometry = g;
  s.events = std::move(events);
  s.t_start = t0;
  s.t_end = t1;
  return s;
}

}  // namespace

TEST(Validate, EmptyStreamIsValid) {
  EXPECT_TRUE(validate(make({4, 4}, {}, 0, 0)).ok());
}

TEST(Validate, XOutOfBounds) {
  auto report = validate(make({4, 4}, {{5, 0, 0, 1}}, 0, 0));
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].message, "x out of bounds at index 0");
  EXPECT_EQ(report.issues[0].index, 0u);
}

TEST(Validate, NonMonotoneTimestamp) {
  auto report = validate(make({4, 4}, {{0, 0, 7, 1}, {0, 0, 3, 1}}, 0, 10));
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].message, "non-monotone timestamp at index 1");
}

TEST(Validate, MutantsAreRejected) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = random_stream(rng, {6, 9}, 20, 100);
    ASSERT_TRUE(validate(s).ok());
    auto bad_y = s;
    bad_y.events[3].y = 6;
    auto bad_p = s;
    bad_p.events[4].p = 0;
    auto bad_t = s;
    bad_t.events[5].t = s.t_end + 1;
    auto bad_order = s;
    std::swap(bad_order.events[0].t, bad_order.events[19].t);
    auto bad_window = s;
    bad_window.t_start = s.t_end + 1;
    auto negative = s;
    negative.t_start = -1;
    for (const auto& m : {bad_y, bad_p, bad_t, bad_window, negative}) EXPECT_FALSE(validate(m).ok());
    if (s.events[0].t != s.events[19].t) {
      EXPECT_FALSE(validate(bad_order).ok());
    }
  }
}

TEST(Evt1, EmptyStreamIsHeaderOnly) {
  const auto bytes = encode_stream(make({4, 4}, {}, 0, 0));
  EXPECT_EQ(bytes.size(), 24u);
  auto s = decode_stream(bytes);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.geometry, (Geometry{4, 4}));
}

TEST(Evt1, OneRecord) {
  auto s = make({4, 4}, {{1, 2, 100, 1}}, 0, 100);
  const auto bytes = encode_stream(s);
  EXPECT_EQ(bytes.size(), 24u + 13u);
  EXPECT_EQ(decode_stream(bytes), s);
}

TEST(Evt1, RoundTripRandom) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_stream(rng, {1 + trial % 40, 1 + trial % 17}, trial * 3, trial * 1000);
    const auto bytes = encode_stream(s);
    ASSERT_EQ(bytes.size(), kEvt1HeaderBytes + kEvt1RecordBytes * s.size());
    auto back = decode_stream(bytes);
    ASSERT_EQ(back, s);
    ASSERT_EQ(encode_stream(back), bytes);
  }
}

TEST(Evt1, LargeStartTimeUsesBothHalves) {
  auto s = make({2, 2}, {{0, 0, (Micros{1} << 40) + 5, -1}}, Micros{1} << 40, (Micros{1} << 40) + 5);
  EXPECT_EQ(decode_stream(encode_stream(s)), s);
}

TEST(Evt1, TruncationReportsOffset) {
  const auto bytes = encode_stream(make({4, 4}, {{1, 1, 1, 1}, {2, 2, 2, 1}}, 0, 2));
  try {
    decode_stream(bytes.substr(0, 24 + 13 + 5));
    FAIL() << "expected truncation";
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.offset(), 24u + 13u + 5u);  // where the input ran out
  }
  EXPECT_THROW(decode_stream(bytes.substr(0, 10)), TruncationError);
}

TEST(Evt1, MalformedHeader) {
  auto bytes = encode_stream(make({4, 4}, {}, 0, 0));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_stream(bad), FormatError);
  bad = bytes;
  bad[4] = 2;  // version
  EXPECT_THROW(decode_stream(bad), FormatError);
  EXPECT_THROW(decode_stream(bytes + "x"), FormatError);
}

TEST(Evt1, BadPolarityIsFormatError) {
  auto bytes = encode_stream(make({4, 4}, {{1, 1, 1, 1}}, 0, 1));
  bytes.back() = 0;
  EXPECT_THROW(decode_stream(bytes), FormatError);
}

TEST(Evt1, ValidationErrorOnRead) {
  auto bytes = encode_stream(make({4, 4}, {{1, 1, 9, 1}, {1, 1, 10, 1}}, 0, 10));
  bytes[24 + 4] = 20;  // first record t = 20 > 10
  EXPECT_THROW(decode_stream(bytes), ValidationError);
}

TEST(Csv, Import) {
  std::istringstream in("x,y,t,p\n1,2,10,1\n3,0,12,-1\n");
  auto s = read_csv(in, {4, 4});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.events[1], (Event{3, 0, 12, -1}));
  EXPECT_EQ(s.t_start, 10);
  EXPECT_EQ(s.t_end, 12);
}

TEST(Csv, Rejects) {
  std::istringstream header("a,b\n");
  EXPECT_THROW(read_csv(header, {4, 4}), FormatError);
  std::istringstream pol("x,y,t,p\n1,1,1,2\n");
  EXPECT_THROW(read_csv(pol, {4, 4}), FormatError);
  std::istringstream order("x,y,t,p\n1,1,5,1\n1,1,4,1\n");
  EXPECT_THROW(read_csv(order, {4, 4}), ValidationError);
  std::istringstream bounds("x,y,t,p\n4,1,5,1\n");
  EXPECT_THROW(read_csv(bounds, {4, 4}), ValidationError);
}

TEST(Window, Identity) {
  std::mt19937_64 rng(5);
  auto s = random_stream(rng, {8, 8}, 100);
  EXPECT_EQ(window(s, s.t_start, s.t_end), s);
}

TEST(Window, EmptyInterval) {
  auto s = make({4, 4}, {{0, 0, 10, 1}, {0, 0, 50, 1}}, 10, 50);
  auto w = window(s, 20, 30);
  EXPECT_TRUE(w.empty());
  EXPECT_EQ(w.t_start, 20);
  EXPECT_EQ(w.t_end, 30);
}

TEST(Window, MatchesFilterAndIsIdempotent) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_stream(rng, {8, 8}, 60, 0, 1000);
    std::uniform_int_distribution<Micros> pick(-10, 1010);
    Micros a = pick(rng), b = pick(rng);
    if (a > b) std::swap(a, b);
    auto w = window(s, a, b);
    std::vector<Event> expected;
    for (const auto& e : s.events) {
      if (a <= e.t && e.t <= b) expected.push_back(e);
    }
    ASSERT_EQ(w.events, expected);
    ASSERT_EQ(window(w, a, b), w);
  }
}

TEST(Window, ReversedBoundsThrow) {
  EXPECT_THROW(window(make({4, 4}, {}, 0, 0), 5, 4), ArgumentError);
}
