#pragma once

#include <optional>
#include <string_view>

#include "dagsel/optim.hpp"
#include "dagsel/pool.hpp"

namespace dagsel {

enum class StrategyKind { RTS, PTS, NE_RFA, NE_CFS };

/// "RTS", "PTS", "NE_RFA", "NE_CFS".
std::string_view to_string(StrategyKind kind);

/// Accepts the canonical names and the short forms rts, pts, rfa, cfs
/// (any case).
std::optional<StrategyKind> parse_strategy_kind(std::string_view name);

/// Uniform selection: q_i = b / m.
MarginalStrategy rts(const TransactionPool& pool, const GameConfig& config);

/// Fee-proportional selection q_i = b v_i / sum v. Coordinates that would
/// exceed 1 are saturated and the leftover capacity is shared proportionally
/// among the rest, repeating until no coordinate exceeds 1.
MarginalStrategy pts(const TransactionPool& pool, const GameConfig& config);

/// Equilibrium kinds throw ConvergenceError when the solver does not
/// converge.
MarginalStrategy make_strategy(StrategyKind kind, const TransactionPool& pool,
                               const GameConfig& config,
                               const SolverConfig& solver = {});

}  // namespace dagsel
