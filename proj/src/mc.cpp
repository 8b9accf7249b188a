#include "dagsel/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dagsel/errors.hpp"
#include "dagsel/summation.hpp"

namespace dagsel {
namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  if (xs.empty()) return out;
  out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    sq[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
  out.std = std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size() - 1));
  return out;
}

}  // namespace

std::vector<std::size_t> sample_subset(std::span<const double> q, int b,
                                       Xoshiro256& rng) {
  const std::size_t m = q.size();
  if (b < 0 || static_cast<std::size_t>(b) > m)
    throw InfeasibleCapacity("cannot draw " + std::to_string(b) + " of " +
                             std::to_string(m) + " transactions");
  for (std::size_t i = 0; i < m; ++i)
    if (!(q[i] >= 0.0 && q[i] <= 1.0)) throw BoundViolation(i);
  const double sum = pairwise_sum(q);
  if (std::abs(sum - b) > kMarginalSumRelTol * std::max(b, 1))
    throw SumMismatch(sum, b);

  std::vector<std::size_t> chosen;
  if (b == 0) return chosen;
  chosen.reserve(static_cast<std::size_t>(b));

  const double scale = b / sum;
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = m; i > 1; --i)
    std::swap(perm[i - 1], perm[rng.below(i)]);

  double target = rng.uniform01();
  double cumulative = 0.0;
  std::vector<bool> taken(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t idx = perm[j];
    cumulative = j + 1 == m ? static_cast<double>(b)
                            : cumulative + std::min(q[idx] * scale, 1.0);
    if (chosen.size() < static_cast<std::size_t>(b) && target < cumulative) {
      chosen.push_back(idx);
      taken[idx] = true;
      target += 1.0;
    }
  }
  // Rounding can only leave a point unassigned when an interval of length
  // one swallows two points; fill from the largest unselected marginals.
  if (chosen.size() < static_cast<std::size_t>(b)) {
    std::vector<std::size_t> rest;
    for (std::size_t idx : perm)
      if (!taken[idx]) rest.push_back(idx);
    std::stable_sort(rest.begin(), rest.end(),
                     [&](std::size_t a, std::size_t c) { return q[a] > q[c]; });
    for (std::size_t idx : rest) {
      if (chosen.size() == static_cast<std::size_t>(b)) break;
      chosen.push_back(idx);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

RunResult simulate_run(std::span<const double> strategy,
                       const TransactionPool& pool, const GameConfig& config,
                       Mechanism mechanism, std::uint64_t seed,
                       std::uint64_t run) {
  if (strategy.size() != pool.size())
    throw std::invalid_argument("strategy length does not match pool size");
  require_capacity(config, pool.size());
  const int n = config.n_validators();
  const int b = config.block_capacity();
  const auto v = pool.fees();
  const std::size_t m = pool.size();

  std::vector<std::vector<int>> includers(m);
  for (int k = 0; k < n; ++k) {
    Xoshiro256 rng(derive_seed(seed, run, static_cast<std::uint64_t>(k)));
    const auto block = sample_subset(strategy, b, rng);
    if (block.size() != static_cast<std::size_t>(b))
      throw std::logic_error("sampled block has wrong size");
    for (std::size_t idx : block) includers[idx].push_back(k);
  }

  RunResult out;
  out.rewards.assign(static_cast<std::size_t>(n), 0.0);
  Xoshiro256 winner_rng(derive_seed(seed, run, static_cast<std::uint64_t>(n)));
  std::vector<double> collected;
  std::vector<double> shares;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& who = includers[i];
    if (who.empty()) continue;
    out.unique_tx += 1.0;
    collected.push_back(v[i]);
    if (mechanism == Mechanism::RFA) {
      const int winner = who[winner_rng.below(who.size())];
      out.rewards[static_cast<std::size_t>(winner)] += v[i];
    } else {
      shares.push_back(v[i] / n);
    }
  }
  out.collected_fees = pairwise_sum(collected);
  if (mechanism == Mechanism::CFS)
    std::fill(out.rewards.begin(), out.rewards.end(), pairwise_sum(shares));
  return out;
}

SimulationReport simulate(std::span<const double> strategy,
                          const TransactionPool& pool,
                          const GameConfig& config, Mechanism mechanism,
                          int runs, std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (strategy.size() != pool.size())
    throw std::invalid_argument("strategy length does not match pool size");
  require_capacity(config, pool.size());

  const int n = config.n_validators();

  std::vector<RunResult> outcomes;
  outcomes.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r)
    outcomes.push_back(simulate_run(strategy, pool, config, mechanism, seed,
                                    static_cast<std::uint64_t>(r)));

  std::vector<double> tx(outcomes.size()), fees(outcomes.size());
  std::vector<double> rewards;
  rewards.reserve(outcomes.size() * static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    tx[r] = outcomes[r].unique_tx;
    fees[r] = outcomes[r].collected_fees;
    rewards.insert(rewards.end(), outcomes[r].rewards.begin(),
                   outcomes[r].rewards.end());
  }

  SimulationReport report;
  report.runs = runs;
  report.seed = seed;
  const auto tx_stats = mean_std(tx);
  const auto fee_stats = mean_std(fees);
  const auto reward_stats = mean_std(rewards);
  report.theta_tx_mean = tx_stats.mean;
  report.theta_tx_std = tx_stats.std;
  report.theta_fee_mean = fee_stats.mean;
  report.theta_fee_std = fee_stats.std;
  report.per_validator_reward_mean = reward_stats.mean;
  report.per_validator_reward_std = reward_stats.std;
  report.validator_reward_means.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    std::vector<double> column(outcomes.size());
    for (std::size_t r = 0; r < outcomes.size(); ++r)
      column[r] = outcomes[r].rewards[static_cast<std::size_t>(k)];
    report.validator_reward_means[static_cast<std::size_t>(k)] =
        pairwise_sum(column) / static_cast<double>(runs);
  }
  return report;
}

}  // namespace dagsel
