#pragma once

// Direct construction of the symmetric equilibrium by partial coverage.
//
// With fee levels v_1 > ... > v_n (k_l transactions each), define the
// coverage function
//
//   G_l(z) = sum_{h<=l} k_h * clamp(f^{-1}(z / v_h), 0, 1) - b,
//
// which is continuous and nonincreasing in z. The covered prefix k_max is the
// longest prefix of levels with G_l(v_l) <= 0 for every l in it, and the
// equalized payoff c is the root of G_{k_max}. Every transaction on level
// l <= k_max is then included with probability clamp(f^{-1}(c / v_l)), and
// levels beyond k_max are never included.

#include <cstddef>
#include <vector>

#include "dagsel/pool.hpp"
#include "dagsel/share_models.hpp"

namespace dagsel {

struct WaterfillingSolution {
  std::size_t k_max;             // number of covered levels (1-based count)
  double c;                      // equalized per-transaction payoff v f(p)
  std::vector<double> q_levels;  // total inclusion mass per level
  MarginalStrategy p;            // per-transaction marginals, pool order
};

/// G_l(z) for the first `prefix` levels (1 <= prefix <= levels.size()).
/// Throws DomainError if z <= 0 and std::out_of_range on a bad prefix.
double g_ell(double z, std::size_t prefix, const FeeLevels& levels,
             const GameConfig& config, const ShareModel& model);

struct CoverageRoot {
  std::size_t k_max;
  double c;
};

/// Linear scan for k_max, then bisection for the smallest root of
/// G_{k_max} to relative tolerance 1e-12. Throws InfeasibleCapacity when
/// b exceeds what the covered levels can absorb.
CoverageRoot find_kmax_and_root(const FeeLevels& levels,
                                const GameConfig& config,
                                const ShareModel& model);

WaterfillingSolution theorem_equilibrium(const FeeLevels& levels,
                                         const GameConfig& config,
                                         Mechanism mechanism);

}  // namespace dagsel
