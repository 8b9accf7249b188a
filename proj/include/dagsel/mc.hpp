#pragma once

// Monte Carlo realization of marginal strategies.
//
// A marginal vector q (sum q = b) is realized as a random b-subset by
// systematic sampling over a uniformly random permutation: walk the permuted
// indices accumulating q, and select the index whose interval contains one of
// the points u, u+1, ..., u+b-1 for a single uniform offset u. Every index is
// selected with probability exactly q_i and every draw has exactly b indices.
//
// Streams: run r, validator k draws its block from
// Xoshiro256(derive_seed(seed, r, k)); the run's RFA winner selection uses
// Xoshiro256(derive_seed(seed, r, N)). Runs are therefore independent of
// execution order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dagsel/pool.hpp"
#include "dagsel/rng.hpp"
#include "dagsel/share_models.hpp"

namespace dagsel {

/// Sorted indices of one b-subset. Throws InfeasibleCapacity if b > q.size()
/// and SumMismatch if sum q is not b within 1e-9 b.
std::vector<std::size_t> sample_subset(std::span<const double> q, int b,
                                       Xoshiro256& rng);

/// One simulated round: blocks of all N validators and the resulting rewards.
struct RunResult {
  double unique_tx = 0.0;
  double collected_fees = 0.0;
  std::vector<double> rewards;  // per validator
};

RunResult simulate_run(std::span<const double> strategy,
                       const TransactionPool& pool, const GameConfig& config,
                       Mechanism mechanism, std::uint64_t seed,
                       std::uint64_t run);

struct SimulationReport {
  int runs = 0;
  double theta_tx_mean = 0.0;
  double theta_tx_std = 0.0;
  double theta_fee_mean = 0.0;
  double theta_fee_std = 0.0;
  // Over all (run, validator) reward samples.
  double per_validator_reward_mean = 0.0;
  double per_validator_reward_std = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> validator_reward_means;  // one per validator
};

/// Per run: every validator draws a block; a transaction counts once if any
/// block holds it. RFA pays its full fee to one includer chosen uniformly;
/// CFS pays v/N to every validator. Sample standard deviations (0 when
/// runs = 1).
SimulationReport simulate(std::span<const double> strategy,
                          const TransactionPool& pool,
                          const GameConfig& config, Mechanism mechanism,
                          int runs, std::uint64_t seed);

}  // namespace dagsel
