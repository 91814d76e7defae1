#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace evrep {

/// Timestamps are integer microseconds.
using Micros = std::int64_t;

struct Geometry {
  int height = 0;  // rows (H)
  int width = 0;   // columns (W)

  std::size_t pixels() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Micros t = 0;
  std::int8_t p = 1;  // -1 or +1

  friend bool operator==(const Event&, const Event&) = default;
};

/// Representation channel of a polarity: -1 -> 0, +1 -> 1.
inline int channel_of(std::int8_t p) { return p > 0 ? 1 : 0; }

/// Time-ordered events over a sensor of fixed geometry and a closed time window.
struct EventStream {
  Geometry geometry;
  std::vector<Event> events;
  Micros t_start = 0;
  Micros t_end = 0;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  friend bool operator==(const EventStream&, const EventStream&) = default;
};

struct ValidationIssue {
  std::size_t index;  // event index, or npos for stream-level issues
  std::string message;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  /// All issues, one per line.
  std::string str() const;
};

/// Checks every stream invariant and reports each violation with its event index.
ValidationReport validate(const EventStream& stream);

/// Throws ValidationError carrying the report text if the stream is invalid.
void require_valid(const EventStream& stream);

// EVT1 binary format (little-endian):
//   header, 24 bytes: "EVT1", u16 version = 1, u16 flags = 0, u16 H, u16 W,
//                     u32 n_events, u32 t_start_lo, u32 t_start_hi
//   record, 13 bytes: u16 x, u16 y, i64 t, i8 p
// The header carries no window end; on read t_end is the last event timestamp
// (t_start for an empty stream).
inline constexpr std::size_t kEvt1HeaderBytes = 24;
inline constexpr std::size_t kEvt1RecordBytes = 13;

EventStream read_stream(std::istream& in);
EventStream read_stream(const std::filesystem::path& path);

/// Writes EVT1 bytes and returns the number written.
std::size_t write_stream(const EventStream& stream, std::ostream& out);
std::size_t write_stream(const EventStream& stream, const std::filesystem::path& path);

/// EVT1 bytes of a stream, in memory.
std::string encode_stream(const EventStream& stream);
EventStream decode_stream(const std::string& bytes);

/// CSV import: header `x,y,t,p`, one event per line. Geometry and window are
/// supplied by the caller (window defaults to [first t, last t]).
EventStream read_csv(std::istream& in, Geometry geometry);

/// Events with a <= t <= b; the result's window is exactly [a, b].
EventStream window(const EventStream& stream, Micros a, Micros b);

}  // namespace evrep
