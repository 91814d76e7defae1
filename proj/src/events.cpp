#include "evrep/events.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "evrep/error.hpp"
#include "byte_io.hpp"

namespace evrep {

namespace {

constexpr char kMagic[4] = {'E', 'V', 'T', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr int kMaxDim = std::numeric_limits<std::uint16_t>::max();

}  // namespace

std::string ValidationReport::str() const {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += '\n';
    out += issue.message;
  }
  return out;
}

ValidationReport validate(const EventStream& stream) {
  ValidationReport report;
  auto add = [&](std::size_t index, std::string message) {
    report.issues.push_back({index, std::move(message)});
  };
  const auto& g = stream.geometry;
  if (g.height <= 0 || g.width <= 0) add(ValidationIssue::npos, "geometry must be positive");
  if (g.height > kMaxDim || g.width > kMaxDim) add(ValidationIssue::npos, "geometry exceeds 65535");
  if (stream.t_start < 0) add(ValidationIssue::npos, "negative window start");
  if (stream.t_start > stream.t_end) add(ValidationIssue::npos, "window start after window end");

  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    const auto at = " at index " + std::to_string(i);
    if (e.x >= g.width) add(i, "x out of bounds" + at);
    if (e.y >= g.height) add(i, "y out of bounds" + at);
    if (e.p != 1 && e.p != -1) add(i, "invalid polarity" + at);
    if (e.t < stream.t_start || e.t > stream.t_end) add(i, "timestamp outside window" + at);
    if (i > 0 && e.t < stream.events[i - 1].t) add(i, "non-monotone timestamp" + at);
  }
  return report;
}

void require_valid(const EventStream& stream) {
  auto report = validate(stream);
  if (!report.ok()) throw ValidationError(report.str());
}

EventStream read_stream(std::istream& in) {
  detail::ByteReader reader(in);
  std::array<char, 4> magic{};
  reader.bytes(magic.data(), magic.size(), "EVT1 header");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw FormatError("bad EVT1 magic");
  const auto version = reader.u16("EVT1 header");
  if (version != kVersion) throw FormatError("unsupported EVT1 version " + std::to_string(version));
  const auto flags = reader.u16("EVT1 header");
  if (flags != 0) throw FormatError("unsupported EVT1 flags " + std::to_string(flags));

  EventStream stream;
  stream.geometry.height = reader.u16("EVT1 header");
  stream.geometry.width = reader.u16("EVT1 header");
  const auto n = reader.u32("EVT1 header");
  const std::uint64_t lo = reader.u32("EVT1 header");
  const std::uint64_t hi = reader.u32("EVT1 header");
  stream.t_start = static_cast<Micros>(lo | (hi << 32));
  if (stream.geometry.height == 0 || stream.geometry.width == 0) throw FormatError("EVT1 geometry must be positive");

  stream.events.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Event e;
    e.x = reader.u16("truncated EVT1 record");
    e.y = reader.u16("truncated EVT1 record");
    e.t = reader.i64("truncated EVT1 record");
    e.p = reader.i8("truncated EVT1 record");
    if (e.p != 1 && e.p != -1) {
      throw FormatError("invalid polarity " + std::to_string(e.p) + " in EVT1 record " + std::to_string(i));
    }
    stream.events.push_back(e);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after EVT1 records");

  stream.t_end = stream.events.empty() ? stream.t_start : std::max(stream.t_start, stream.events.back().t);
  require_valid(stream);
  return stream;
}

EventStream read_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_stream(in);
}

std::size_t write_stream(const EventStream& stream, std::ostream& out) {
  require_valid(stream);
  if (stream.events.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ArgumentError("EVT1 holds at most 2^32-1 events");
  }
  detail::ByteWriter writer(out);
  writer.bytes(kMagic, 4);
  writer.u16(kVersion);
  writer.u16(0);
  writer.u16(static_cast<std::uint16_t>(stream.geometry.height));
  writer.u16(static_cast<std::uint16_t>(stream.geometry.width));
  writer.u32(static_cast<std::uint32_t>(stream.events.size()));
  const auto t0 = static_cast<std::uint64_t>(stream.t_start);
  writer.u32(static_cast<std::uint32_t>(t0 & 0xffffffffu));
  writer.u32(static_cast<std::uint32_t>(t0 >> 32));
  for (const Event& e : stream.events) {
    writer.u16(e.x);
    writer.u16(e.y);
    writer.i64(e.t);
    writer.i8(e.p);
  }
  if (!out) throw IoError("write failed");
  return writer.count();
}

std::size_t write_stream(const EventStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  auto n = write_stream(stream, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
  return n;
}

std::string encode_stream(const EventStream& stream) {
  std::ostringstream out(std::ios::binary);
  write_stream(stream, out);
  return std::move(out).str();
}

EventStream decode_stream(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_stream(in);
}

EventStream read_csv(std::istream& in, Geometry geometry) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,t,p") throw FormatError("CSV header must be x,y,t,p");

  EventStream stream;
  stream.geometry = geometry;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long x = 0, y = 0, t = 0, p = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(fields >> x >> c1 >> y >> c2 >> t >> c3 >> p) || c1 != ',' || c2 != ',' || c3 != ',') {
      throw FormatError("malformed CSV line " + std::to_string(lineno));
    }
    fields >> std::ws;
    if (!fields.eof()) throw FormatError("trailing data on CSV line " + std::to_string(lineno));
    if (x < 0 || y < 0 || x > kMaxDim || y > kMaxDim) {
      throw ValidationError("coordinate out of range on CSV line " + std::to_string(lineno));
    }
    if (p != 1 && p != -1) throw FormatError("invalid polarity on CSV line " + std::to_string(lineno));
    stream.events.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), t, static_cast<std::int8_t>(p)});
  }
  if (!stream.events.empty()) {
    stream.t_start = stream.events.front().t;
    stream.t_end = stream.events.back().t;
  }
  require_valid(stream);
  return stream;
}

EventStream window(const EventStream& stream, Micros a, Micros b) {
  if (a > b) throw ArgumentError("window start after window end");
  EventStream out;
  out.geometry = stream.geometry;
  out.t_start = a;
  out.t_end = b;
  auto lo = std::lower_bound(stream.events.begin(), stream.events.end(), a,
                             [](const Event& e, Micros t) { return e.t < t; });
  auto hi = std::upper_bound(lo, stream.events.end(), b, [](Micros t, const Event& e) { return t < e.t; });
  out.events.assign(lo, hi);
  return out;
}

}  // namespace evrep
