#include "evrep/repr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>

#include "evrep/error.hpp"
#include "evrep/neighborhood.hpp"
#include "evrep/parallel.hpp"
#include "rank.hpp"

namespace evrep {

namespace {

constexpr std::array<ReprKind, 9> kAllKinds = {
    ReprKind::Binary,     ReprKind::Histogram,         ReprKind::Timestamp, ReprKind::EventImage, ReprKind::TimeSurface,
    ReprKind::Hats,       ReprKind::SortedTimeSurface, ReprKind::Dit,       ReprKind::Dist,
};

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("tau must be a positive finite number of microseconds");
}

void check_rho(int rho) {
  if (rho < 2) throw ArgumentError("discount radius rho must be > 1, got " + std::to_string(rho));
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be a finite number >= 0");
}

ReprGrid make_grid(ReprKind kind, const EventStream& s, int channels = 2) {
  return ReprGrid(kind, s.geometry, channels, s.t_start, s.t_end);
}

NeighborhoodStats checked_pixel_stats(const EventStream& stream) {
  require_valid(stream);
  return pixel_stats(stream);
}

double time_surface_value(Micros t_new, Micros t_end, double tau) {
  return std::exp(-static_cast<double>(t_end - t_new) / tau);
}

// Per occupied cell: raw newest timestamp plus the neighborhood span and count
// that make up its discount.
std::vector<detail::DiscountedTime> discounted_times(const EventStream& stream, int rho,
                                                     const NeighborhoodStats& pixel) {
  const NeighborhoodStats hood = compute_stats(stream, rho);
  std::vector<detail::DiscountedTime> cells;
  for (std::size_t i = 0; i < pixel.count.size(); ++i) {
    if (pixel.count[i] == 0) continue;
    cells.push_back({pixel.t_new[i], hood.t_new[i] - hood.t_old[i], hood.count[i], static_cast<std::uint32_t>(i)});
  }
  return cells;
}

}  // namespace

std::string_view kind_name(ReprKind kind) {
  switch (kind) {
    case ReprKind::Binary: return "binary";
    case ReprKind::Histogram: return "histogram";
    case ReprKind::Timestamp: return "timestamp";
    case ReprKind::EventImage: return "event_image";
    case ReprKind::TimeSurface: return "time_surface";
    case ReprKind::Hats: return "hats";
    case ReprKind::SortedTimeSurface: return "sorted_ts";
    case ReprKind::Dit: return "dit";
    case ReprKind::Dist: return "dist";
    case ReprKind::Discount: return "discount";
  }
  return "unknown";
}

std::optional<ReprKind> parse_kind(std::string_view name) {
  for (ReprKind k : kAllKinds) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::span<const ReprKind> all_kinds() { return kAllKinds; }

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

ReprGrid binary_event_image(const EventStream& stream) {
  const auto stats = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::Binary, stream);
  for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = stats.count[i] > 0 ? 1.0 : 0.0;
  return g;
}

ReprGrid event_histogram(const EventStream& stream) {
  const auto stats = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::Histogram, stream);
  for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = static_cast<double>(stats.count[i]);
  return g;
}

ReprGrid timestamp_image(const EventStream& stream) {
  const auto stats = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::Timestamp, stream);
  const Micros span = stream.t_end - stream.t_start;
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    if (stats.count[i] == 0) continue;
    g.data[i] = span == 0 ? 1.0 : static_cast<double>(stats.t_new[i] - stream.t_start) / static_cast<double>(span);
  }
  return g;
}

ReprGrid event_image(const EventStream& stream) {
  const ReprGrid hist = event_histogram(stream);
  const ReprGrid ts = timestamp_image(stream);
  ReprGrid g = make_grid(ReprKind::EventImage, stream, 4);
  std::copy(hist.data.begin(), hist.data.end(), g.data.begin());
  std::copy(ts.data.begin(), ts.data.end(), g.data.begin() + static_cast<std::ptrdiff_t>(hist.data.size()));
  return g;
}

ReprGrid time_surface(const EventStream& stream, double tau) {
  check_tau(tau);
  const auto stats = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::TimeSurface, stream);
  g.params = {{"tau", format_real(tau)}};
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    if (stats.count[i] > 0) g.data[i] = time_surface_value(stats.t_new[i], stream.t_end, tau);
  }
  return g;
}

ReprGrid hats_surface(const EventStream& stream, int cell, double tau) {
  check_tau(tau);
  if (cell < 1) throw ArgumentError("HATS cell size must be >= 1");
  const auto stats = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::Hats, stream);
  g.params = {{"cell", std::to_string(cell)}, {"tau", format_real(tau)}};
  const int H = stream.geometry.height;
  const int W = stream.geometry.width;
  const int tiles_y = (H + cell - 1) / cell;
  const int tiles_x = (W + cell - 1) / cell;
  parallel_for(0, static_cast<std::size_t>(2 * tiles_y), [&](std::size_t job) {
    const int c = static_cast<int>(job) / tiles_y;
    const int y0 = (static_cast<int>(job) % tiles_y) * cell;
    const int y1 = std::min(H, y0 + cell);
    for (int tx = 0; tx < tiles_x; ++tx) {
      const int x0 = tx * cell;
      const int x1 = std::min(W, x0 + cell);
      double sum = 0.0;
      int occupied = 0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const auto i = stats.index(x, y, c);
          if (stats.count[i] == 0) continue;
          sum += time_surface_value(stats.t_new[i], stream.t_end, tau);
          ++occupied;
        }
      }
      const double mean = occupied > 0 ? sum / occupied : 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) g.at(x, y, c) = mean;
      }
    }
  });
  return g;
}

ReprGrid discount_grid(const EventStream& stream, int rho) {
  check_rho(rho);
  const auto pixel = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::Discount, stream);
  g.params = {{"rho", std::to_string(rho)}};
  for (const auto& cell : discounted_times(stream, rho, pixel)) g.data[cell.index] = cell.discount();
  return g;
}

ReprGrid dit(const EventStream& stream, double alpha, int rho) {
  check_alpha(alpha);
  check_rho(rho);
  const auto pixel = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::Dit, stream);
  g.params = {{"alpha", format_real(alpha)}, {"rho", std::to_string(rho)}};
  const auto cells = discounted_times(stream, rho, pixel);
  if (cells.empty()) return g;

  std::vector<double> raw(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) raw[k] = cells[k].approx(alpha);
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    g.data[cells[k].index] = range > 0.0 ? (raw[k] - min) / range : 1.0;
  }
  return g;
}

ReprGrid dist(const EventStream& stream, double alpha, int rho) {
  check_alpha(alpha);
  check_rho(rho);
  const auto pixel = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::Dist, stream);
  g.params = {{"alpha", format_real(alpha)}, {"rho", std::to_string(rho)}};
  auto cells = discounted_times(stream, rho, pixel);
  detail::sort_discounted(cells, alpha);
  const double m = static_cast<double>(cells.size());
  for (std::size_t r = 0; r < cells.size(); ++r) g.data[cells[r].index] = static_cast<double>(r + 1) / m;
  return g;
}

ReprGrid sorted_time_surface(const EventStream& stream, int tile) {
  if (tile < 0) throw ArgumentError("sort tile must be >= 0");
  const auto pixel = checked_pixel_stats(stream);
  ReprGrid g = make_grid(ReprKind::SortedTimeSurface, stream);
  g.params = {{"sort_tile", std::to_string(tile)}};

  struct Entry {
    Micros t;
    std::uint32_t index;
  };
  auto rank_into = [&](std::vector<Entry>& entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.t != b.t ? a.t < b.t : a.index < b.index; });
    const double m = static_cast<double>(entries.size());
    for (std::size_t r = 0; r < entries.size(); ++r) g.data[entries[r].index] = static_cast<double>(r + 1) / m;
  };

  if (tile == 0) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < pixel.count.size(); ++i) {
      if (pixel.count[i] > 0) entries.push_back({pixel.t_new[i], static_cast<std::uint32_t>(i)});
    }
    rank_into(entries);
    return g;
  }

  const int H = stream.geometry.height;
  const int W = stream.geometry.width;
  const int tiles_y = (H + tile - 1) / tile;
  const int tiles_x = (W + tile - 1) / tile;
  parallel_for(0, static_cast<std::size_t>(tiles_y) * tiles_x, [&](std::size_t job) {
    const int y0 = static_cast<int>(job / tiles_x) * tile;
    const int x0 = static_cast<int>(job % tiles_x) * tile;
    std::vector<Entry> entries;
    for (int c = 0; c < 2; ++c) {
      for (int y = y0; y < std::min(H, y0 + tile); ++y) {
        for (int x = x0; x < std::min(W, x0 + tile); ++x) {
          const auto i = pixel.index(x, y, c);
          if (pixel.count[i] > 0) entries.push_back({pixel.t_new[i], static_cast<std::uint32_t>(i)});
        }
      }
    }
    rank_into(entries);
  });
  return g;
}

ReprGrid compute(ReprKind kind, const EventStream& stream, const ReprParams& p) {
  switch (kind) {
    case ReprKind::Binary: return binary_event_image(stream);
    case ReprKind::Histogram: return event_histogram(stream);
    case ReprKind::Timestamp: return timestamp_image(stream);
    case ReprKind::EventImage: return event_image(stream);
    case ReprKind::TimeSurface: return time_surface(stream, p.tau);
    case ReprKind::Hats: return hats_surface(stream, p.cell, p.tau);
    case ReprKind::SortedTimeSurface: return sorted_time_surface(stream, p.sort_tile);
    case ReprKind::Dit: return dit(stream, p.alpha, p.rho);
    case ReprKind::Dist: return dist(stream, p.alpha, p.rho);
    case ReprKind::Discount: return discount_grid(stream, p.rho);
  }
  throw ArgumentError("unknown representation kind");
}

}  // namespace evrep
