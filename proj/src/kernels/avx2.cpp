// AVX2 variants. This translation unit is the only one compiled with -mavx2;
// callers reach it through the dispatch table after a CPU feature check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "dagsel/kernels/kernels.hpp"
#include "kernels_internal.hpp"

namespace dagsel::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline __m256d load_weight(std::span<const double> w, std::size_t i) {
  return w.empty() ? _mm256_set1_pd(1.0) : _mm256_loadu_pd(w.data() + i);
}

inline __m256d ipow(__m256d x, int e) {
  __m256d result = _mm256_set1_pd(1.0);
  __m256d base = x;
  while (e > 0) {
    if (e & 1) result = _mm256_mul_pd(result, base);
    e >>= 1;
    if (e > 0) base = _mm256_mul_pd(base, base);
  }
  return result;
}

ClampStats clamp_shift_stats(std::span<const double> y,
                             std::span<const double> w, double shift) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc_sum = zero, acc_free_sum = zero, acc_free_w = zero,
          acc_upper_w = zero;

  const std::size_t n = y.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d yi = _mm256_loadu_pd(y.data() + i);
    const __m256d wi = load_weight(w, i);
    const __m256d d = _mm256_sub_pd(yi, s);
    const __m256d upper = _mm256_cmp_pd(d, one, _CMP_GE_OQ);
    const __m256d positive = _mm256_cmp_pd(d, zero, _CMP_GT_OQ);
    const __m256d free = _mm256_andnot_pd(upper, positive);
    const __m256d clamped = _mm256_min_pd(_mm256_max_pd(d, zero), one);
    acc_sum = _mm256_add_pd(acc_sum, _mm256_mul_pd(wi, clamped));
    acc_free_sum =
        _mm256_add_pd(acc_free_sum, _mm256_and_pd(free, _mm256_mul_pd(wi, yi)));
    acc_free_w = _mm256_add_pd(acc_free_w, _mm256_and_pd(free, wi));
    acc_upper_w = _mm256_add_pd(acc_upper_w, _mm256_and_pd(upper, wi));
  }

  ClampStats st{hsum(acc_sum), hsum(acc_free_sum), hsum(acc_free_w),
                hsum(acc_upper_w)};
  for (; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
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
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_set1_pd(shift);
  const std::size_t n = y.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), s);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_min_pd(_mm256_max_pd(d, zero), one));
  }
  for (; i < n; ++i) {
    const double d = y[i] - shift;
    const double lo = d > 0.0 ? d : 0.0;
    out[i] = lo < 1.0 ? lo : 1.0;
  }
}

double weighted_coverage(std::span<const double> q, std::span<const double> w,
                         int n) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  const std::size_t len = q.size();
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const __m256d u = _mm256_sub_pd(one, _mm256_loadu_pd(q.data() + i));
    const __m256d covered = _mm256_sub_pd(one, ipow(u, n));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(load_weight(w, i), covered));
  }
  double s = hsum(acc);
  for (; i < len; ++i)
    s += (w.empty() ? 1.0 : w[i]) * (1.0 - detail::ipow(1.0 - q[i], n));
  return s;
}

void cfs_gradient(std::span<const double> p, std::span<const double> v, int n,
                  std::span<double> out) {
  const __m256d one = _mm256_set1_pd(1.0);
  const std::size_t len = p.size();
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const __m256d u = _mm256_sub_pd(one, _mm256_loadu_pd(p.data() + i));
    _mm256_storeu_pd(out.data() + i,
                     _mm256_mul_pd(_mm256_loadu_pd(v.data() + i), ipow(u, n - 1)));
  }
  for (; i < len; ++i) out[i] = v[i] * detail::ipow(1.0 - p[i], n - 1);
}

void rfa_gradient(std::span<const double> p, std::span<const double> v, int n,
                  std::span<double> out) {
  const double inv_n_scalar = 1.0 / n;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inv_n = _mm256_set1_pd(inv_n_scalar);
  const std::size_t len = p.size();
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const __m256d u = _mm256_sub_pd(one, _mm256_loadu_pd(p.data() + i));
    __m256d s = one;
    for (int j = 1; j < n; ++j) s = _mm256_add_pd(one, _mm256_mul_pd(u, s));
    _mm256_storeu_pd(out.data() + i,
                     _mm256_mul_pd(_mm256_loadu_pd(v.data() + i),
                                   _mm256_mul_pd(s, inv_n)));
  }
  for (; i < len; ++i) {
    const double u = 1.0 - p[i];
    double s = 1.0;
    for (int j = 1; j < n; ++j) s = 1.0 + u * s;
    out[i] = v[i] * (s * inv_n_scalar);
  }
}

void ascent_step(std::span<const double> p, std::span<const double> g,
                 double eta, std::span<double> out) {
  const __m256d e = _mm256_set1_pd(eta);
  const std::size_t len = p.size();
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const __m256d step = _mm256_mul_pd(e, _mm256_loadu_pd(g.data() + i));
    _mm256_storeu_pd(out.data() + i,
                     _mm256_add_pd(_mm256_loadu_pd(p.data() + i), step));
  }
  for (; i < len; ++i) out[i] = p[i] + eta * g[i];
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  const std::size_t len = a.size();
  std::size_t i = 0;
  for (; i + kLanes <= len; i += kLanes) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, d));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < len; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

constexpr KernelTable kAvx2{
    "avx2",       clamp_shift_stats, clamp_shift, weighted_coverage,
    cfs_gradient, rfa_gradient,      ascent_step, max_abs_diff,
};

}  // namespace

namespace detail {
const KernelTable& avx2_table() { return kAvx2; }
}  // namespace detail

}  // namespace dagsel::kernels
