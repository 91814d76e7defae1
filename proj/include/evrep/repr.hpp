#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evrep/events.hpp"

namespace evrep {

/// Representation identifiers. The numeric values are the RGR1 kind ids.
enum class ReprKind : std::uint16_t {
  Binary = 1,
  Histogram = 2,
  Timestamp = 3,
  EventImage = 4,
  TimeSurface = 5,
  Hats = 6,
  SortedTimeSurface = 7,
  Dit = 8,
  Dist = 9,
  Discount = 10,  // auxiliary: the per-pixel discount D feeding DiT/DiST
};

/// CLI name of a kind ("binary", "histogram", ..., "dist").
std::string_view kind_name(ReprKind kind);
std::optional<ReprKind> parse_kind(std::string_view name);
/// The nine image representations, in id order.
std::span<const ReprKind> all_kinds();

/// Parameters of the parametric representations. None of the defaults come
/// from a published configuration; outputs always record the values used.
struct ReprParams {
  double alpha = 5.0;     // discount factor
  int rho = 3;            // neighborhood radius, >= 2 for the discount
  double tau = 50000.0;   // time-surface decay, microseconds
  int cell = 8;           // HATS tile edge, pixels
  int sort_tile = 0;      // sorted time surface: 0 = global sort, else tile edge
};

using ParamList = std::vector<std::pair<std::string, std::string>>;

/// Dense H x W x C grid of one representation. Layout is channel-major, then
/// row-major. For two-channel kinds channel 0 holds polarity -1 and channel 1
/// polarity +1; the event image stacks histogram (0, 1) over timestamp (2, 3).
struct ReprGrid {
  ReprKind kind = ReprKind::Binary;
  Geometry geometry;
  int channels = 2;
  std::vector<double> data;
  ParamList params;
  Micros t_start = 0;
  Micros t_end = 0;

  ReprGrid() = default;
  ReprGrid(ReprKind k, Geometry g, int c, Micros t0, Micros t1)
      : kind(k), geometry(g), channels(c), data(static_cast<std::size_t>(c) * g.pixels(), 0.0), t_start(t0), t_end(t1) {}

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(c) * geometry.height + static_cast<std::size_t>(y)) * geometry.width +
           static_cast<std::size_t>(x);
  }
  double& at(int x, int y, int c) { return data[index(x, y, c)]; }
  double at(int x, int y, int c) const { return data[index(x, y, c)]; }
  std::span<const double> channel(int c) const {
    return std::span<const double>(data).subspan(static_cast<std::size_t>(c) * geometry.pixels(), geometry.pixels());
  }

  friend bool operator==(const ReprGrid&, const ReprGrid&) = default;
};

ReprGrid binary_event_image(const EventStream& stream);
ReprGrid event_histogram(const EventStream& stream);

/// Newest timestamp per (pixel, polarity) scaled by the window to [0, 1];
/// 0 where empty. A zero-length window maps occupied cells to 1.
ReprGrid timestamp_image(const EventStream& stream);

/// Four channels: event_histogram then timestamp_image.
ReprGrid event_image(const EventStream& stream);

/// exp(-(t_end - t_new) / tau) where occupied, else 0.
ReprGrid time_surface(const EventStream& stream, double tau);

/// Tile-averaged time surface: the sensor is cut into cell x cell tiles and
/// each tile takes, per polarity, the mean time-surface value of its occupied
/// pixels (0 when none).
ReprGrid hats_surface(const EventStream& stream, int cell, double tau);

/// Neighborhood event period D = (T_new - T_old) / C over the radius-rho
/// neighborhood, in microseconds, at every occupied (pixel, polarity); 0 elsewhere.
ReprGrid discount_grid(const EventStream& stream, int rho);

/// Discounted timestamp image: t_new - alpha * D in raw microseconds, then
/// min-max normalized over occupied cells (all 1 if they are equal).
ReprGrid dit(const EventStream& stream, double alpha, int rho);

/// Global rank transform of the discounted timestamps. Occupied cells of both
/// channels are ranked 1..m jointly by ascending t_new - alpha * D (ties by
/// channel, row, column) and divided by m; empty cells are 0. Comparisons are
/// exact, so the output is invariant under any t -> a*t + b with a > 0.
ReprGrid dist(const EventStream& stream, double alpha, int rho);

/// Rank transform of the newest timestamps (dist with alpha = 0). With
/// tile > 0 ranks are computed independently inside each tile x tile patch.
ReprGrid sorted_time_surface(const EventStream& stream, int tile = 0);

/// Dispatches to the representation named by `kind`.
ReprGrid compute(ReprKind kind, const EventStream& stream, const ReprParams& params = {});

// RGR1 format (little-endian): "RGR1", u16 kind id, u16 H, u16 W, u16 C,
// u16 L, L bytes of UTF-8 "key=value" lines (window bounds first), then
// C*H*W f64 values, channel-major then row-major.
std::size_t write_grid(const ReprGrid& grid, std::ostream& out);
std::size_t write_grid(const ReprGrid& grid, const std::filesystem::path& path);
ReprGrid read_grid(std::istream& in);
ReprGrid read_grid(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

}  // namespace evrep
