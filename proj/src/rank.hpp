#pragma once

#include <cstdint>
#include <vector>

#include "evrep/events.hpp"

namespace evrep::detail {

/// One occupied (pixel, polarity) cell: S = t_new - alpha * span / count.
struct DiscountedTime {
  Micros t_new;
  Micros span;           // T_new - T_old over the neighborhood
  std::uint32_t count;   // events in the neighborhood, >= 1
  std::uint32_t index;   // flat grid index; the tie-break order

  double discount() const { return static_cast<double>(span) / static_cast<double>(count); }
  double approx(double alpha) const { return static_cast<double>(t_new) - alpha * discount(); }
};

/// Exact three-way comparison of the discounted timestamps of a and b.
int compare_exact(const DiscountedTime& a, const DiscountedTime& b, double alpha);

/// Sorts ascending by exact discounted timestamp, ties by index. Floating
/// keys decide whenever they are separated by more than their rounding error
/// bound; the remaining near-ties fall back to integer arithmetic.
void sort_discounted(std::vector<DiscountedTime>& cells, double alpha);

}  // namespace evrep::detail
