#include <algorithm>
#include <cmath>

#include "dagsel/kernels/kernels.hpp"
#include "kernels_internal.hpp"

namespace dagsel::kernels {
namespace {

inline double weight_at(std::span<const double> w, std::size_t i) {
  return w.empty() ? 1.0 : w[i];
}

ClampStats clamp_shift_stats(std::span<const double> y,
                             std::span<const double> w, double shift) {
  ClampStats st;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double wi = weight_at(w, i);
    const double d = y[i] - shift;
    if (d >= 1.0) {
      st.sum += wi;
      st.upper_weight += wi;
    } else if (d > 0.0) {
      st.sum += wi * d;
      st.free_sum += wi * y[i];
      st.free_weight += wi;
    }
  }
  return st;
}

void clamp_shift(std::span<const double> y, double shift,
                 std::span<double> out) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - shift;
    const double lo = d > 0.0 ? d : 0.0;
    out[i] = lo < 1.0 ? lo : 1.0;
  }
}

double weighted_coverage(std::span<const double> q, std::span<const double> w,
                         int n) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    s += weight_at(w, i) * (1.0 - detail::ipow(1.0 - q[i], n));
  return s;
}

void cfs_gradient(std::span<const double> p, std::span<const double> v, int n,
                  std::span<double> out) {
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = v[i] * detail::ipow(1.0 - p[i], n - 1);
}

void rfa_gradient(std::span<const double> p, std::span<const double> v, int n,
                  std::span<double> out) {
  const double inv_n = 1.0 / n;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double u = 1.0 - p[i];
    double s = 1.0;
    for (int j = 1; j < n; ++j) s = 1.0 + u * s;
    out[i] = v[i] * (s * inv_n);
  }
}

void ascent_step(std::span<const double> p, std::span<const double> g,
                 double eta, std::span<double> out) {
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] + eta * g[i];
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

constexpr KernelTable kScalar{
    "scalar",       clamp_shift_stats, clamp_shift, weighted_coverage,
    cfs_gradient,   rfa_gradient,      ascent_step, max_abs_diff,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace dagsel::kernels
