#include "dagsel/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dagsel/errors.hpp"
#include "dagsel/kernels/kernels.hpp"
#include "dagsel/summation.hpp"

namespace dagsel {
namespace {

constexpr double kProjectionTol = 1e-12;
constexpr int kProjectionMaxIter = 200;
constexpr double kSnap = 1e-12;
constexpr double kKktTol = 1e-6;

void require_same_length(std::span<const double> p,
                         const TransactionPool& pool) {
  if (p.size() != pool.size())
    throw std::invalid_argument("strategy length " + std::to_string(p.size()) +
                                " does not match pool size " +
                                std::to_string(pool.size()));
}

double lipschitz_bound(Mechanism mechanism, double v1, int n) {
  return mechanism == Mechanism::CFS ? v1 * (n - 1) : v1 * n / 2.0;
}

void compute_gradient(Mechanism mechanism, std::span<const double> p,
                      std::span<const double> v, int n, std::span<double> out) {
  const auto& k = kernels::active_kernels();
  if (mechanism == Mechanism::RFA)
    k.rfa_gradient(p, v, n, out);
  else
    k.cfs_gradient(p, v, n, out);
}

// integral_0^p log alpha_hat(q) dq by 8-point Gauss-Legendre on 16 panels.
double integrate_log_alpha_hat(double p, int n) {
  static constexpr double kNodes[4] = {0.1834346424956498, 0.5255324099163290,
                                       0.7966664774136267, 0.9602898564975363};
  static constexpr double kWeights[4] = {0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};
  constexpr int kPanels = 16;
  if (p <= 0.0) return 0.0;
  const double h = p / kPanels;
  double total = 0.0;
  for (int j = 0; j < kPanels; ++j) {
    const double mid = (j + 0.5) * h;
    double panel = 0.0;
    for (int t = 0; t < 4; ++t) {
      const double dx = 0.5 * h * kNodes[t];
      panel += kWeights[t] * (std::log(alpha_hat(mid - dx, n)) +
                              std::log(alpha_hat(mid + dx, n)));
    }
    total += 0.5 * h * panel;
  }
  return total;
}

double median(std::vector<double> xs) {
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  if (xs.size() % 2 == 1) return xs[mid];
  const double upper = xs[mid];
  const double lower = *std::max_element(xs.begin(), xs.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (step_size && !(*step_size > 0.0))
    throw std::invalid_argument("step size must be positive");
}

std::vector<double> project_capped_simplex(std::span<const double> y,
                                           std::span<const double> weights,
                                           double b) {
  if (!weights.empty() && weights.size() != y.size())
    throw std::invalid_argument("weights length does not match");
  const double total =
      weights.empty() ? static_cast<double>(y.size()) : pairwise_sum(weights);
  const double tol = kProjectionTol * std::max(b, 1.0);
  if (!(b >= 0.0) || b > total + tol)
    throw InfeasibleCapacity("capacity " + std::to_string(b) +
                             " outside [0, " + std::to_string(total) + "]");

  std::vector<double> p(y.size());
  if (y.empty()) return p;
  if (b == 0.0) return p;
  if (b >= total) {
    std::fill(p.begin(), p.end(), 1.0);
    return p;
  }

  const auto& k = kernels::active_kernels();
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  double lo = *ymin - 1.0;  // everything saturated: sum = total >= b
  double hi = *ymax;        // everything at zero:    sum = 0 <= b
  double shift = 0.5 * (lo + hi);
  double best_err = std::numeric_limits<double>::infinity();

  for (int it = 0; it < kProjectionMaxIter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto st = k.clamp_shift_stats(y, weights, mid);
    const double err = std::abs(st.sum - b);
    if (err < best_err) {
      best_err = err;
      shift = mid;
    }
    if (err <= tol) break;

    // Exact shift if the active set at `mid` is the final one.
    if (st.free_weight > 0.0) {
      const double cand = (st.free_sum + st.upper_weight - b) / st.free_weight;
      if (cand >= lo && cand <= hi) {
        const double cand_err =
            std::abs(k.clamp_shift_stats(y, weights, cand).sum - b);
        if (cand_err < best_err) {
          best_err = cand_err;
          shift = cand;
        }
        if (cand_err <= tol) break;
      }
    }
    if (st.sum > b)
      lo = mid;
    else
      hi = mid;
  }
  k.clamp_shift(y, shift, p);
  return p;
}

std::vector<double> project_capped_simplex(std::span<const double> y,
                                           double b) {
  return project_capped_simplex(y, {}, b);
}

double objective(Mechanism mechanism, std::span<const double> p,
                 const TransactionPool& pool, const GameConfig& config) {
  require_same_length(p, pool);
  const int n = config.n_validators();
  const auto v = pool.fees();
  if (mechanism == Mechanism::CFS)
    return kernels::active_kernels().weighted_coverage(p, v, n) / n;
  std::vector<double> terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    terms[i] = v[i] * rfa_potential(p[i], n);
  return pairwise_sum(terms);
}

std::vector<double> gradient(Mechanism mechanism, std::span<const double> p,
                             const TransactionPool& pool,
                             const GameConfig& config) {
  require_same_length(p, pool);
  std::vector<double> g(p.size());
  compute_gradient(mechanism, p, pool.fees(), config.n_validators(), g);
  return g;
}

double kkt_residual(Mechanism mechanism, std::span<const double> p,
                    const TransactionPool& pool, const GameConfig& config) {
  require_same_length(p, pool);
  const ShareModel model(mechanism, config.n_validators());
  const auto v = pool.fees();
  const double f0 = model.at_zero();
  const double f1 = model.at_one();

  enum class Side { Zero, Interior, One };
  std::vector<Side> side(p.size());
  std::vector<double> payoff(p.size());
  std::vector<double> interior;
  double max_zero = -std::numeric_limits<double>::infinity();
  double min_one = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= kSnap) {
      side[i] = Side::Zero;
      payoff[i] = v[i] * f0;
      max_zero = std::max(max_zero, payoff[i]);
    } else if (p[i] >= 1.0 - kSnap) {
      side[i] = Side::One;
      payoff[i] = v[i] * f1;
      min_one = std::min(min_one, payoff[i]);
    } else {
      side[i] = Side::Interior;
      payoff[i] = v[i] * model.share(p[i]);
      interior.push_back(payoff[i]);
    }
  }

  double lambda = 0.0;
  if (!interior.empty())
    lambda = median(std::move(interior));
  else if (std::isfinite(max_zero))
    lambda = max_zero;
  else if (std::isfinite(min_one))
    lambda = min_one;

  double residual = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    switch (side[i]) {
      case Side::Interior:
        residual = std::max(residual, std::abs(payoff[i] - lambda));
        break;
      case Side::Zero:
        residual = std::max(residual, payoff[i] - lambda);
        break;
      case Side::One:
        residual = std::max(residual, lambda - payoff[i]);
        break;
    }
  }
  return residual;
}

double ascent_potential(Mechanism mechanism, AscentPotential potential,
                        std::span<const double> p, const TransactionPool& pool,
                        const GameConfig& config) {
  if (potential == AscentPotential::Direct)
    return objective(mechanism, p, pool, config);
  require_same_length(p, pool);
  const int n = config.n_validators();
  const auto v = pool.fees();
  std::vector<double> terms(p.size());
  if (mechanism == Mechanism::CFS) {
    for (std::size_t i = 0; i < p.size(); ++i)
      terms[i] = std::pow(v[i], 1.0 / (n - 1)) * (p[i] - 0.5 * p[i] * p[i]);
  } else {
    for (std::size_t i = 0; i < p.size(); ++i)
      terms[i] = p[i] * std::log(v[i]) + integrate_log_alpha_hat(p[i], n);
  }
  return pairwise_sum(terms);
}

EquilibriumResult solve_ne(Mechanism mechanism, const TransactionPool& pool,
                           const GameConfig& config,
                           const SolverConfig& solver,
                           const IterationObserver& observer) {
  solver.validate();
  const std::size_t m = pool.size();
  require_capacity(config, m);
  const int n = config.n_validators();
  const double b = config.block_capacity();

  const FeeLevels levels = group_fee_levels(pool);
  const std::size_t count = levels.size();
  std::vector<double> values, weights;
  for (const auto& lv : levels.levels()) {
    values.push_back(lv.value);
    weights.push_back(static_cast<double>(lv.count));
  }

  const auto& k = kernels::active_kernels();
  const bool rescaled = solver.potential == AscentPotential::Rescaled;
  // Per-level coefficients of the rescaled gradients.
  std::vector<double> coef(count), ones(count, 1.0);
  double default_step = 0.0;
  if (!rescaled) {
    default_step = 1.0 / (lipschitz_bound(mechanism, pool.max_fee(), n) + 1.0);
  } else if (mechanism == Mechanism::CFS) {
    for (std::size_t l = 0; l < count; ++l)
      coef[l] = std::pow(values[l], 1.0 / (n - 1));
    default_step = 1.0 / coef[0];
  } else {
    for (std::size_t l = 0; l < count; ++l) coef[l] = std::log(values[l]);
    // |d/dp log alpha_hat| <= max((N-1)/2, 1.16) < N/2.
    default_step = 2.0 / n;
  }
  const double eta = solver.step_size.value_or(default_step);

  std::vector<double> p(count, b / static_cast<double>(m));
  std::vector<double> g(count), y(count);
  int iterations = 0;
  double change = 0.0;
  bool settled = false;

  if (static_cast<std::size_t>(config.block_capacity()) == m) {
    std::fill(p.begin(), p.end(), 1.0);
    settled = true;
  }
  while (!settled && iterations < solver.max_iters) {
    if (!rescaled) {
      compute_gradient(mechanism, p, values, n, g);
    } else if (mechanism == Mechanism::CFS) {
      k.cfs_gradient(p, coef, 2, g);
    } else {
      k.rfa_gradient(p, ones, n, g);
      for (std::size_t l = 0; l < count; ++l) g[l] = coef[l] + std::log(g[l]);
    }
    k.ascent_step(p, g, eta, y);
    std::vector<double> next = project_capped_simplex(y, weights, b);
    change = k.max_abs_diff(next, p);
    p = std::move(next);
    ++iterations;
    if (observer) observer(iterations, p);
    settled = change < solver.tol;
  }

  std::vector<double> full;
  full.reserve(m);
  for (std::size_t l = 0; l < count; ++l)
    full.insert(full.end(), levels[l].count, p[l]);

  EquilibriumResult result{validate_marginals(std::move(full), config)};
  result.iterations = iterations;
  result.last_change = change;
  result.kkt_residual = kkt_residual(mechanism, result.strategy, pool, config);
  result.objective = objective(mechanism, result.strategy, pool, config);
  result.converged =
      settled && result.kkt_residual <= kKktTol * pool.max_fee();
  return result;
}

}  // namespace dagsel
