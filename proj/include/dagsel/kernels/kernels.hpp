#pragma once

// Data-parallel inner loops shared by the solvers, metrics and simulator.
//
// Every kernel has a scalar reference implementation. Wider variants (AVX2 on
// x86-64) are compiled in separate translation units and selected at runtime
// from the CPU feature set. Elementwise kernels use the same operation order
// in every variant and agree bit-for-bit; reductions use lane-parallel
// accumulators and agree up to summation order.
//
// An optional weight span `w` (empty = all ones) lets callers run the same
// loops over fee levels with multiplicities instead of individual
// transactions.
//
// Set DAGSEL_KERNELS=scalar (or avx2) in the environment to force a variant.

#include <cstddef>
#include <span>
#include <string_view>

namespace dagsel::kernels {

struct ClampStats {
  double sum = 0.0;           // sum of w * clamp(y - shift, 0, 1)
  double free_sum = 0.0;      // sum of w * y over 0 < y - shift < 1
  double free_weight = 0.0;   // sum of w over 0 < y - shift < 1
  double upper_weight = 0.0;  // sum of w over y - shift >= 1
};

struct KernelTable {
  std::string_view name;

  ClampStats (*clamp_shift_stats)(std::span<const double> y,
                                  std::span<const double> w, double shift);

  // out[i] = clamp(y[i] - shift, 0, 1)
  void (*clamp_shift)(std::span<const double> y, double shift,
                      std::span<double> out);

  // sum of w[i] * (1 - (1 - q[i])^n)
  double (*weighted_coverage)(std::span<const double> q,
                              std::span<const double> w, int n);

  // out[i] = v[i] * (1 - p[i])^(n-1)
  void (*cfs_gradient)(std::span<const double> p, std::span<const double> v,
                       int n, std::span<double> out);

  // out[i] = v[i] * (1/n) * sum_{j<n} (1 - p[i])^j, the collision-adjusted
  // share with its p = 0 limit of v[i].
  void (*rfa_gradient)(std::span<const double> p, std::span<const double> v,
                       int n, std::span<double> out);

  // out[i] = p[i] + eta * g[i]
  void (*ascent_step)(std::span<const double> p, std::span<const double> g,
                      double eta, std::span<double> out);

  double (*max_abs_diff)(std::span<const double> a,
                         std::span<const double> b);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when it was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Table chosen for this process (environment override, then CPU features).
const KernelTable& active_kernels();

}  // namespace dagsel::kernels
