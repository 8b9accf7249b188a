#include "dagsel/strategies.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "dagsel/errors.hpp"
#include "dagsel/summation.hpp"

namespace dagsel {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::RTS: return "RTS";
    case StrategyKind::PTS: return "PTS";
    case StrategyKind::NE_RFA: return "NE_RFA";
    case StrategyKind::NE_CFS: return "NE_CFS";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "rts") return StrategyKind::RTS;
  if (lower == "pts") return StrategyKind::PTS;
  if (lower == "rfa" || lower == "ne_rfa" || lower == "ne-rfa")
    return StrategyKind::NE_RFA;
  if (lower == "cfs" || lower == "ne_cfs" || lower == "ne-cfs")
    return StrategyKind::NE_CFS;
  return std::nullopt;
}

MarginalStrategy rts(const TransactionPool& pool, const GameConfig& config) {
  require_capacity(config, pool.size());
  const double q = static_cast<double>(config.block_capacity()) /
                   static_cast<double>(pool.size());
  return validate_marginals(std::vector<double>(pool.size(), q), config);
}

MarginalStrategy pts(const TransactionPool& pool, const GameConfig& config) {
  require_capacity(config, pool.size());
  const auto v = pool.fees();
  const std::size_t m = v.size();
  std::vector<bool> saturated(m, false);
  std::vector<double> q(m, 0.0);
  std::size_t n_saturated = 0;

  for (std::size_t round = 0; round <= m; ++round) {
    const double residual =
        static_cast<double>(config.block_capacity()) - static_cast<double>(n_saturated);
    std::vector<double> free_fees;
    for (std::size_t i = 0; i < m; ++i)
      if (!saturated[i]) free_fees.push_back(v[i]);
    const double free_total = pairwise_sum(free_fees);

    bool clipped = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (saturated[i]) {
        q[i] = 1.0;
        continue;
      }
      q[i] = residual > 0.0 ? residual * v[i] / free_total : 0.0;
      if (q[i] > 1.0) {
        saturated[i] = true;
        ++n_saturated;
        clipped = true;
      }
    }
    if (!clipped) break;
  }
  for (double& x : q) x = std::min(x, 1.0);
  return validate_marginals(std::move(q), config);
}

MarginalStrategy make_strategy(StrategyKind kind, const TransactionPool& pool,
                               const GameConfig& config,
                               const SolverConfig& solver) {
  switch (kind) {
    case StrategyKind::RTS: return rts(pool, config);
    case StrategyKind::PTS: return pts(pool, config);
    case StrategyKind::NE_RFA:
    case StrategyKind::NE_CFS: {
      const Mechanism mechanism =
          kind == StrategyKind::NE_RFA ? Mechanism::RFA : Mechanism::CFS;
      EquilibriumResult result = solve_ne(mechanism, pool, config, solver);
      if (!result.converged)
        throw ConvergenceError(std::string(to_string(kind)) +
                               " solver did not converge after " +
                               std::to_string(result.iterations) + " iterations");
      return std::move(result.strategy);
    }
  }
  throw std::invalid_argument("unknown strategy kind");
}

}  // namespace dagsel
