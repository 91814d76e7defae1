#include "rank.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace evrep::detail {

namespace {

using boost::multiprecision::cpp_int;

constexpr double kUlp = 0x1p-52;

struct Keyed {
  double value;
  double error;  // bound on |value - exact|
};

Keyed keyed(const DiscountedTime& c, double alpha) {
  const double discounted = alpha * c.discount();
  const double value = static_cast<double>(c.t_new) - discounted;
  // Three roundings (divide, multiply, subtract); timestamps below 2^53 are exact.
  return {value, (std::abs(static_cast<double>(c.t_new)) + 4.0 * std::abs(discounted)) * kUlp};
}

}  // namespace

int compare_exact(const DiscountedTime& a, const DiscountedTime& b, double alpha) {
  // a < b  <=>  (t_a - t_b) * C_a * C_b  <  alpha * (span_a * C_b - span_b * C_a)
  cpp_int lhs = cpp_int(a.t_new - b.t_new) * a.count * b.count;
  cpp_int rhs = cpp_int(a.span) * b.count - cpp_int(b.span) * a.count;
  if (alpha == 0.0 || rhs == 0) {
    rhs = 0;
  } else {
    int exponent = 0;
    const double mantissa = std::frexp(alpha, &exponent);
    // alpha == m * 2^(exponent - 53) with m an exact 53-bit integer.
    const auto m = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    rhs *= m;
    const int shift = exponent - 53;
    if (shift >= 0) {
      rhs <<= shift;
    } else {
      lhs <<= -shift;
    }
  }
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

void sort_discounted(std::vector<DiscountedTime>& cells, double alpha) {
  struct Item {
    Keyed key;
    DiscountedTime cell;
  };
  std::vector<Item> items;
  items.reserve(cells.size());
  for (const auto& c : cells) items.push_back({keyed(c, alpha), c});

  std::sort(items.begin(), items.end(), [alpha](const Item& a, const Item& b) {
    const double gap = a.key.value - b.key.value;
    if (std::abs(gap) > a.key.error + b.key.error) return gap < 0.0;
    const int order = compare_exact(a.cell, b.cell, alpha);
    return order != 0 ? order < 0 : a.cell.index < b.cell.index;
  });
  for (std::size_t i = 0; i < items.size(); ++i) cells[i] = items[i].cell;
}

}  // namespace evrep::detail
