#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "evrep/events.hpp"

namespace evrep {

/// Marks a (pixel, polarity) cell whose neighborhood holds no events.
/// Distinct from every legal timestamp, including 0.
inline constexpr Micros kEmpty = std::numeric_limits<Micros>::min();

/// Per-(pixel, polarity) aggregates over the Chebyshev ball of radius `rho`
/// ((2*rho+1)^2 square, clipped at the sensor border), spanning the whole
/// stream window in time.
///
/// Grids are H x W x 2, laid out channel-major then row-major; channel 0 is
/// polarity -1 and channel 1 is polarity +1 (see channel_of).
struct NeighborhoodStats {
  int rho = 0;
  Geometry geometry;
  std::vector<Micros> t_new;          // newest timestamp, or kEmpty
  std::vector<Micros> t_old;          // oldest timestamp, or kEmpty
  std::vector<std::uint32_t> count;   // number of events

  std::size_t index(int x, int y, int channel) const {
    return (static_cast<std::size_t>(channel) * geometry.height + static_cast<std::size_t>(y)) * geometry.width +
           static_cast<std::size_t>(x);
  }
  Micros newest(int x, int y, int channel) const { return t_new[index(x, y, channel)]; }
  Micros oldest(int x, int y, int channel) const { return t_old[index(x, y, channel)]; }
  std::uint32_t events(int x, int y, int channel) const { return count[index(x, y, channel)]; }

  friend bool operator==(const NeighborhoodStats&, const NeighborhoodStats&) = default;
};

/// Neighborhood statistics of every (pixel, polarity) at radius `rho` >= 0.
/// Runs in O(n + H*W) independent of rho.
NeighborhoodStats compute_stats(const EventStream& stream, int rho);

/// Per-pixel statistics; identical to compute_stats(stream, 0).
NeighborhoodStats pixel_stats(const EventStream& stream);

}  // namespace evrep
