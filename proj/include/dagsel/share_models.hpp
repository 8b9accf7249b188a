#pragma once

// Expected fee share of one validator when every validator includes a
// transaction independently with marginal probability p.
//
//   RFA (random fee allocation):    f(p) = (1 - (1-p)^N) / (N p)
//   CFS (collaborative fee sharing): f(p) = (1/N) (1-p)^(N-1)
//
// Both are strictly decreasing on [0, 1]. All functions here are pure.

#include <optional>
#include <string_view>

namespace dagsel {

enum class Mechanism { RFA, CFS };

std::string_view to_string(Mechanism m);
std::optional<Mechanism> parse_mechanism(std::string_view name);

/// RFA share for 0 < p <= 1, n >= 2. Throws DomainError otherwise.
double rfa_share(double p, int n);

/// Binomial-sum form sum_{i<n} C(n-1,i) p^i (1-p)^(n-1-i) / (i+1), i.e.
/// E[1/(X+1)] with X ~ Binomial(n-1, p). Independent route to rfa_share.
double rfa_share_sum_form(double p, int n);

/// Collision adjustment factor: rfa_share for q > 0 and its limit 1 at q = 0.
double alpha_hat(double q, int n);

/// CFS share for 0 <= p <= 1.
double cfs_share(double p, int n);

/// Inverse of cfs_share on [0, 1/n]: 1 - (n x)^(1/(n-1)).
double cfs_share_inverse(double x, int n);

/// Inverse of rfa_share on [1/n, 1], by bisection to 1e-12.
double rfa_share_inverse(double x, int n);

/// Integral of alpha_hat from 0 to p. Concave and nondecreasing in p.
double rfa_potential(double p, int n);

/// A share function bound to a mechanism and a validator count.
class ShareModel {
 public:
  ShareModel(Mechanism mechanism, int n_validators);

  Mechanism mechanism() const noexcept { return mechanism_; }
  int n_validators() const noexcept { return n_; }

  /// f(p) on [0, 1]; RFA uses the continuous extension at p = 0.
  double share(double p) const;

  /// f^{-1}(x) on [f(1), f(0)].
  double inverse(double x) const;

  /// f^{-1} extended to the whole half line: 0 above f(0), 1 below f(1).
  double clamped_inverse(double x) const;

  double at_zero() const noexcept;  // f(0): 1 for RFA, 1/N for CFS
  double at_one() const noexcept;   // f(1): 1/N for RFA, 0 for CFS

 private:
  Mechanism mechanism_;
  int n_;
};

}  // namespace dagsel
