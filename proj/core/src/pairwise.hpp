#pragma once

#include <span>

namespace kminlab::detail {

// Pairwise (cascade) summation; order-stable and O(log n) error growth.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace kminlab::detail
