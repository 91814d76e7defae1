#include "evrep/neighborhood.hpp"

#include <algorithm>
#include <string>

#include "evrep/error.hpp"
#include "evrep/parallel.hpp"

namespace evrep {

namespace {

constexpr Micros kNoMin = std::numeric_limits<Micros>::max();

// Clipped sliding-window reduction along one line of `n` samples read at
// in[i*stride]. Sums use a running total; extrema use a monotone deque so the
// cost is O(n) for any radius.
struct LineReducer {
  std::vector<int> deque;
  std::vector<std::uint64_t> prefix;

  void sum(const std::uint32_t* in, std::size_t in_stride, std::uint32_t* out, std::size_t out_stride, int n, int rho) {
    prefix.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + in[i * in_stride];
    for (int i = 0; i < n; ++i) {
      const int lo = std::max(0, i - rho);
      const int hi = std::min(n - 1, i + rho);
      out[i * out_stride] = static_cast<std::uint32_t>(prefix[hi + 1] - prefix[lo]);
    }
  }

  template <class Better>
  void extreme(const Micros* in, std::size_t in_stride, Micros* out, std::size_t out_stride, int n, int rho,
               Better better) {
    deque.assign(static_cast<std::size_t>(n), 0);
    int head = 0, tail = 0;  // live indices are deque[head, tail)
    int next = 0;            // next sample to enter the window
    for (int c = 0; c < n; ++c) {
      const int hi = std::min(n - 1, c + rho);
      for (; next <= hi; ++next) {
        const Micros v = in[next * in_stride];
        while (tail > head && !better(in[deque[tail - 1] * in_stride], v)) --tail;
        deque[tail++] = next;
      }
      while (deque[head] < c - rho) ++head;
      out[c * out_stride] = in[deque[head] * in_stride];
    }
  }
};

}  // namespace

NeighborhoodStats pixel_stats(const EventStream& stream) {
  const Geometry g = stream.geometry;
  NeighborhoodStats stats;
  stats.rho = 0;
  stats.geometry = g;
  const std::size_t cells = 2 * g.pixels();
  stats.t_new.assign(cells, kEmpty);
  stats.t_old.assign(cells, kEmpty);
  stats.count.assign(cells, 0);
  for (const Event& e : stream.events) {
    const auto i = stats.index(e.x, e.y, channel_of(e.p));
    if (stats.count[i]++ == 0) {
      stats.t_new[i] = e.t;
      stats.t_old[i] = e.t;
    } else {
      stats.t_new[i] = std::max(stats.t_new[i], e.t);
      stats.t_old[i] = std::min(stats.t_old[i], e.t);
    }
  }
  return stats;
}

NeighborhoodStats compute_stats(const EventStream& stream, int rho) {
  if (rho < 0) throw ArgumentError("neighborhood radius must be >= 0, got " + std::to_string(rho));
  NeighborhoodStats base = pixel_stats(stream);
  if (rho == 0) return base;

  const int H = stream.geometry.height;
  const int W = stream.geometry.width;
  const std::size_t plane = stream.geometry.pixels();
  const std::size_t cells = 2 * plane;

  // Empty cells take the identity of each reduction: kEmpty (INT64_MIN) for
  // max, INT64_MAX for min.
  std::vector<Micros> min_in(base.t_old);
  for (std::size_t i = 0; i < cells; ++i) {
    if (base.count[i] == 0) min_in[i] = kNoMin;
  }

  std::vector<std::uint32_t> row_count(cells);
  std::vector<Micros> row_max(cells), row_min(cells);
  parallel_for(0, static_cast<std::size_t>(2 * H), [&](std::size_t line) {
    LineReducer r;
    const std::size_t off = line * static_cast<std::size_t>(W);
    r.sum(&base.count[off], 1, &row_count[off], 1, W, rho);
    r.extreme(&base.t_new[off], 1, &row_max[off], 1, W, rho, std::greater<>{});
    r.extreme(&min_in[off], 1, &row_min[off], 1, W, rho, std::less<>{});
  });

  NeighborhoodStats stats;
  stats.rho = rho;
  stats.geometry = stream.geometry;
  stats.count.assign(cells, 0);
  stats.t_new.assign(cells, kEmpty);
  stats.t_old.assign(cells, kEmpty);
  const auto stride = static_cast<std::size_t>(W);
  parallel_for(0, static_cast<std::size_t>(2 * W), [&](std::size_t line) {
    LineReducer r;
    const std::size_t channel = line / static_cast<std::size_t>(W);
    const std::size_t off = channel * plane + line % static_cast<std::size_t>(W);
    r.sum(&row_count[off], stride, &stats.count[off], stride, H, rho);
    r.extreme(&row_max[off], stride, &stats.t_new[off], stride, H, rho, std::greater<>{});
    r.extreme(&row_min[off], stride, &stats.t_old[off], stride, H, rho, std::less<>{});
    for (int y = 0; y < H; ++y) {
      const std::size_t i = off + static_cast<std::size_t>(y) * stride;
      if (stats.count[i] == 0) stats.t_old[i] = kEmpty;
    }
  });
  return stats;
}

}  // namespace evrep
