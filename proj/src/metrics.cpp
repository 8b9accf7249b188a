#include "dagsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dagsel/kernels/kernels.hpp"
#include "dagsel/summation.hpp"

namespace dagsel {
namespace {

void require_same_length(std::span<const double> q,
                         const TransactionPool& pool) {
  if (q.size() != pool.size())
    throw std::invalid_argument("strategy length " + std::to_string(q.size()) +
                                " does not match pool size " +
                                std::to_string(pool.size()));
}

}  // namespace

double effective_tx_throughput(std::span<const double> q,
                               const GameConfig& config) {
  return kernels::active_kernels().weighted_coverage(q, {},
                                                     config.n_validators());
}

double effective_fee_throughput(std::span<const double> q,
                                const TransactionPool& pool,
                                const GameConfig& config) {
  require_same_length(q, pool);
  return kernels::active_kernels().weighted_coverage(q, pool.fees(),
                                                     config.n_validators());
}

double symmetric_payoff(Mechanism mechanism, std::span<const double> q,
                        const TransactionPool& pool, const GameConfig& config) {
  require_same_length(q, pool);
  const int n = config.n_validators();
  if (mechanism == Mechanism::CFS)
    return effective_fee_throughput(q, pool, config) / n;
  const auto v = pool.fees();
  std::vector<double> terms(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    terms[i] = q[i] == 0.0 ? 0.0 : q[i] * v[i] * alpha_hat(q[i], n);
  return pairwise_sum(terms);
}

ThroughputReport throughput_report(Mechanism mechanism,
                                   std::span<const double> q,
                                   const TransactionPool& pool,
                                   const GameConfig& config) {
  return {effective_tx_throughput(q, config),
          effective_fee_throughput(q, pool, config),
          symmetric_payoff(mechanism, q, pool, config)};
}

BestResponse best_response(Mechanism mechanism, std::span<const double> q,
                           const TransactionPool& pool,
                           const GameConfig& config) {
  require_same_length(q, pool);
  require_capacity(config, pool.size());
  const int n = config.n_validators();
  const auto v = pool.fees();
  const std::size_t m = q.size();

  BestResponse br;
  br.coefficients.resize(m);
  if (mechanism == Mechanism::RFA) {
    for (std::size_t i = 0; i < m; ++i)
      br.coefficients[i] = v[i] * alpha_hat(q[i], n);
  } else {
    std::vector<double> others(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double none_other = std::pow(1.0 - q[i], n - 1);
      br.coefficients[i] = v[i] / n * none_other;
      others[i] = v[i] / n * (1.0 - none_other);
    }
    br.baseline = pairwise_sum(others);
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto b = static_cast<std::size_t>(config.block_capacity());
  std::partial_sort(order.begin(), order.begin() + b, order.end(),
                    [&](std::size_t a, std::size_t c) {
                      if (br.coefficients[a] != br.coefficients[c])
                        return br.coefficients[a] > br.coefficients[c];
                      return a < c;
                    });
  br.strategy.assign(m, 0.0);
  std::vector<double> chosen(b);
  std::sort(order.begin(), order.begin() + b);
  for (std::size_t j = 0; j < b; ++j) {
    br.strategy[order[j]] = 1.0;
    chosen[j] = br.coefficients[order[j]];
  }
  br.payoff = br.baseline + pairwise_sum(chosen);
  return br;
}

double ne_gap(Mechanism mechanism, std::span<const double> q,
              const TransactionPool& pool, const GameConfig& config) {
  const double deviation = best_response(mechanism, q, pool, config).payoff;
  return std::max(0.0, deviation - symmetric_payoff(mechanism, q, pool, config));
}

}  // namespace dagsel
