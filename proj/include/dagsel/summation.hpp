#pragma once

#include <cstddef>
#include <span>

namespace dagsel {

/// Pairwise (cascade) summation. Result depends only on the element order,
/// not on how the caller produced the elements.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 16;
  if (xs.size() <= kBlock) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace dagsel
