#pragma once

#include <span>
#include <vector>

#include "dagsel/pool.hpp"
#include "dagsel/share_models.hpp"

namespace dagsel {

struct ThroughputReport {
  double theta_tx = 0.0;   // expected number of distinct included transactions
  double theta_fee = 0.0;  // expected total fee of included transactions
  double per_validator_payoff = 0.0;
};

/// sum_i 1 - (1 - q_i)^N
double effective_tx_throughput(std::span<const double> q,
                               const GameConfig& config);

/// sum_i v_i (1 - (1 - q_i)^N)
double effective_fee_throughput(std::span<const double> q,
                                const TransactionPool& pool,
                                const GameConfig& config);

/// Expected reward of one validator when all play q.
double symmetric_payoff(Mechanism mechanism, std::span<const double> q,
                        const TransactionPool& pool, const GameConfig& config);

ThroughputReport throughput_report(Mechanism mechanism,
                                   std::span<const double> q,
                                   const TransactionPool& pool,
                                   const GameConfig& config);

struct BestResponse {
  std::vector<double> strategy;      // 0/1 indicator of the chosen block
  std::vector<double> coefficients;  // marginal payoff of including each tx
  double baseline = 0.0;  // CFS: reward from others' inclusions alone
  double payoff = 0.0;    // baseline + sum of chosen coefficients
};

/// A single deviator's payoff is linear in its own marginals, so the best
/// response is the block of the b largest coefficients (ties to the lower
/// index).
BestResponse best_response(Mechanism mechanism, std::span<const double> q,
                           const TransactionPool& pool,
                           const GameConfig& config);

/// max(0, best response payoff - symmetric payoff).
double ne_gap(Mechanism mechanism, std::span<const double> q,
              const TransactionPool& pool, const GameConfig& config);

}  // namespace dagsel
