#pragma once

// Symmetric equilibria as maximizers of concave potentials over the capped
// simplex {p : sum p = b, 0 <= p <= 1}:
//
//   RFA: sum_i v_i * integral_0^{p_i} alpha_hat(q) dq
//   CFS: sum_i (v_i / N) * (1 - (1 - p_i)^N)
//
// Their KKT points are exactly the profiles where v_i f(p_i) is equal on
// interior coordinates, no larger on excluded ones and no smaller on
// saturated ones.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dagsel/pool.hpp"
#include "dagsel/share_models.hpp"

namespace dagsel {

/// Which potential the ascent climbs. Both have the same maximizers.
///
/// Direct climbs the potentials above with step 1 / (L + 1), L a Lipschitz
/// bound of the gradient. Its curvature spans many orders of magnitude when
/// fees or N are large (CFS gradients decay like (1 - p)^(N-1)), which makes
/// fixed-step ascent crawl.
///
/// Rescaled climbs the potential whose gradient is a monotone transform of
/// the payoff, equal across coordinates exactly when payoffs are:
///   RFA: log v_i + log alpha_hat(p_i), step 2 / N
///   CFS: v_i^(1/(N-1)) (1 - p_i),      step 1 / max_i v_i^(1/(N-1))
/// Both are well conditioned and invariant under fee scaling.
enum class AscentPotential { Rescaled, Direct };

struct SolverConfig {
  AscentPotential potential = AscentPotential::Rescaled;
  std::optional<double> step_size;  // nullopt: the rule of `potential`
  int max_iters = 100000;
  double tol = 1e-9;  // on the l-infinity change between iterates

  void validate() const;
};

struct EquilibriumResult {
  MarginalStrategy strategy;
  int iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
  double last_change = 0.0;
  bool converged = false;
};

/// Euclidean projection onto {sum p = b, 0 <= p <= 1}: p_i = clamp(y_i - s)
/// with the shift s found by bisection (each step also tries the exact shift
/// of the current active set) until |sum p - b| <= 1e-12 max(b, 1).
/// Throws InfeasibleCapacity unless 0 <= b <= y.size().
std::vector<double> project_capped_simplex(std::span<const double> y, double b);

/// Same projection with multiplicities: minimizes sum w_i (p_i - y_i)^2
/// subject to sum w_i p_i = b.
std::vector<double> project_capped_simplex(std::span<const double> y,
                                           std::span<const double> weights,
                                           double b);

double objective(Mechanism mechanism, std::span<const double> p,
                 const TransactionPool& pool, const GameConfig& config);

/// Value of the potential climbed under `potential`; the RFA rescaled
/// potential integrates log alpha_hat by Gauss-Legendre quadrature.
double ascent_potential(Mechanism mechanism, AscentPotential potential,
                        std::span<const double> p, const TransactionPool& pool,
                        const GameConfig& config);

/// RFA: v_i alpha_hat(p_i); CFS: v_i (1 - p_i)^(N-1).
std::vector<double> gradient(Mechanism mechanism, std::span<const double> p,
                             const TransactionPool& pool,
                             const GameConfig& config);

/// Largest violation of the equal-payoff conditions on u_i = v_i f(p_i),
/// measured against a common level lambda (median of interior u_i; with no
/// interior coordinate, the largest u_i over excluded coordinates, else the
/// smallest over saturated ones). Coordinates within 1e-12 of a bound are
/// treated as on it.
double kkt_residual(Mechanism mechanism, std::span<const double> p,
                    const TransactionPool& pool, const GameConfig& config);

/// Called after every iteration with the iterate on fee levels (in
/// group_fee_levels order).
using IterationObserver =
    std::function<void(int iteration, std::span<const double> level_marginals)>;

/// Fixed-step projected gradient ascent from p = b/m on the selected
/// potential. Transactions sharing a fee stay tied along the whole
/// trajectory, so the iteration runs on fee levels with multiplicities. converged requires the iterate change to drop
/// below tol and the KKT residual to be at most 1e-6 v_1; otherwise the last
/// iterate is returned with converged = false.
EquilibriumResult solve_ne(Mechanism mechanism, const TransactionPool& pool,
                           const GameConfig& config,
                           const SolverConfig& solver = {},
                           const IterationObserver& observer = {});

}  // namespace dagsel
