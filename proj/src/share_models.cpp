#include "dagsel/share_models.hpp"

#include <cmath>
#include <string>

#include "dagsel/errors.hpp"

namespace dagsel {
namespace {

constexpr double kSmallP = 1e-8;
constexpr double kInverseTol = 1e-12;
constexpr int kInverseMaxIter = 200;

void require_validators(int n) {
  if (n < 2)
    throw DomainError("validator count must be >= 2, got " + std::to_string(n));
}

void require_closed_unit(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError(std::string(what) + ": argument outside [0,1]: " +
                      std::to_string(p));
}

// Leading terms of sum_{k=1}^{n} C(n,k) (-1)^{k+1} p^{k-1} / n; converges
// fast because p < 1e-8.
double rfa_share_series(double p, int n) {
  double term = 1.0;
  double sum = term;
  for (int k = 1; k < n; ++k) {
    term *= -p * static_cast<double>(n - k) / static_cast<double>(k + 1);
    sum += term;
    if (std::abs(term) < 1e-20) break;
  }
  return sum;
}

}  // namespace

std::string_view to_string(Mechanism m) {
  return m == Mechanism::RFA ? "rfa" : "cfs";
}

std::optional<Mechanism> parse_mechanism(std::string_view name) {
  if (name == "rfa" || name == "RFA") return Mechanism::RFA;
  if (name == "cfs" || name == "CFS") return Mechanism::CFS;
  return std::nullopt;
}

double rfa_share(double p, int n) {
  require_validators(n);
  if (!(p > 0.0 && p <= 1.0))
    throw DomainError("rfa_share: p outside (0,1]: " + std::to_string(p));
  if (p < kSmallP) return rfa_share_series(p, n);
  return -std::expm1(n * std::log1p(-p)) / (n * p);
}

double rfa_share_sum_form(double p, int n) {
  require_validators(n);
  if (!(p > 0.0 && p <= 1.0))
    throw DomainError("rfa_share_sum_form: p outside (0,1]: " +
                      std::to_string(p));
  const int trials = n - 1;
  double binom = 1.0;  // C(trials, i)
  double sum = 0.0;
  for (int i = 0; i <= trials; ++i) {
    sum += binom * std::pow(p, i) * std::pow(1.0 - p, trials - i) / (i + 1);
    binom = binom * (trials - i) / (i + 1);
  }
  return sum;
}

double alpha_hat(double q, int n) {
  require_validators(n);
  require_closed_unit(q, "alpha_hat");
  return q == 0.0 ? 1.0 : rfa_share(q, n);
}

double cfs_share(double p, int n) {
  require_validators(n);
  require_closed_unit(p, "cfs_share");
  return std::pow(1.0 - p, n - 1) / n;
}

double cfs_share_inverse(double x, int n) {
  require_validators(n);
  if (!(x >= 0.0 && x <= 1.0 / n))
    throw DomainError("cfs_share_inverse: x outside [0,1/n]: " +
                      std::to_string(x));
  const double p = 1.0 - std::pow(n * x, 1.0 / (n - 1));
  return p < 0.0 ? 0.0 : p;
}

double rfa_share_inverse(double x, int n) {
  require_validators(n);
  const double lower = 1.0 / n;
  if (!(x >= lower && x <= 1.0))
    throw DomainError("rfa_share_inverse: x outside [1/n,1]: " +
                      std::to_string(x));
  if (x == 1.0) return 0.0;
  if (x == lower) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < kInverseMaxIter && hi - lo > kInverseTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (alpha_hat(mid, n) > x)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Substituting u = 1 - q turns the integrand into the geometric sum
// (1/n) sum_{j<n} u^j, so the integral is (1/n) sum_{k=1}^{n} (1-(1-p)^k)/k.
// Every term is nonnegative; no cancellation for any n.
double rfa_potential(double p, int n) {
  require_validators(n);
  require_closed_unit(p, "rfa_potential");
  if (p == 0.0) return 0.0;
  const double log_u = std::log1p(-p);
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) sum += -std::expm1(k * log_u) / k;
  return sum / n;
}

ShareModel::ShareModel(Mechanism mechanism, int n_validators)
    : mechanism_(mechanism), n_(n_validators) {
  require_validators(n_validators);
}

double ShareModel::share(double p) const {
  return mechanism_ == Mechanism::RFA ? alpha_hat(p, n_) : cfs_share(p, n_);
}

double ShareModel::inverse(double x) const {
  return mechanism_ == Mechanism::RFA ? rfa_share_inverse(x, n_)
                                      : cfs_share_inverse(x, n_);
}

double ShareModel::clamped_inverse(double x) const {
  if (x >= at_zero()) return 0.0;
  if (x <= at_one()) return 1.0;
  return inverse(x);
}

double ShareModel::at_zero() const noexcept {
  return mechanism_ == Mechanism::RFA ? 1.0 : 1.0 / n_;
}

double ShareModel::at_one() const noexcept {
  return mechanism_ == Mechanism::RFA ? 1.0 / n_ : 0.0;
}

}  // namespace dagsel
