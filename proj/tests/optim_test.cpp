#include <gtest/gtest.h>

#include <cmath>

#include "dagsel/errors.hpp"
#include "dagsel/optim.hpp"
#include "dagsel/rng.hpp"
#include "dagsel/waterfilling.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace dagsel;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<double> expand_levels(const FeeLevels& levels,
                                  std::span<const double> per_level) {
  std::vector<double> out;
  for (std::size_t l = 0; l < levels.size(); ++l)
    out.insert(out.end(), levels[l].count, per_level[l]);
  return out;
}

// Any [0,1] vector with the right sum; objective/gradient do not care
// about capacity, so we build a throwaway config.
std::vector<double> random_interior(Xoshiro256& rng, std::size_t m) {
  std::vector<double> p(m);
  for (double& x : p) x = 0.05 + 0.9 * rng.uniform01();
  return p;
}

}  // namespace

TEST(Projection, Examples) {
  const std::vector<double> y{0.9, 0.6, 0.3};
  const auto p = project_capped_simplex(y, 1.0);
  EXPECT_NEAR(p[0], 0.9 - 0.8 / 3, 1e-12);
  EXPECT_NEAR(p[1], 0.6 - 0.8 / 3, 1e-12);
  EXPECT_NEAR(p[2], 0.3 - 0.8 / 3, 1e-12);

  const std::vector<double> feasible{0.25, 0.5, 0.25, 1.0};
  EXPECT_LE(oracle::max_abs_diff(project_capped_simplex(feasible, 2.0), feasible), 1e-12);

  const auto clamped = project_capped_simplex(std::vector<double>{2, -1}, 1.0);
  EXPECT_NEAR(clamped[0], 1.0, 1e-12);
  EXPECT_NEAR(clamped[1], 0.0, 1e-12);
}

TEST(Projection, EdgeCapacities) {
  const std::vector<double> y{0.3, -2, 5};
  EXPECT_EQ(project_capped_simplex(y, 0.0), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(project_capped_simplex(y, 3.0), (std::vector<double>{1, 1, 1}));
  EXPECT_THROW(project_capped_simplex(y, 4.0), InfeasibleCapacity);
  EXPECT_THROW(project_capped_simplex(y, -1.0), InfeasibleCapacity);
}

TEST(Projection, MatchesBruteForceOracle) {
  Xoshiro256 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + rng.below(8);
    std::vector<double> y(d);
    for (double& x : y) x = -1.5 + 4.0 * rng.uniform01();
    const double b = rng.uniform01() * static_cast<double>(d);
    const auto got = project_capped_simplex(y, b);
    const auto want = oracle::brute_projection(y, b);
    ASSERT_EQ(want.size(), d);
    EXPECT_LE(oracle::max_abs_diff(got, want), 1e-9) << "trial " << trial;
  }
}

TEST(Projection, WeightedEqualsExpandedUnweighted) {
  Xoshiro256 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t levels = 1 + rng.below(6);
    std::vector<double> y(levels), w(levels), y_full;
    for (std::size_t l = 0; l < levels; ++l) {
      y[l] = -1.0 + 3.0 * rng.uniform01();
      w[l] = static_cast<double>(1 + rng.below(4));
      y_full.insert(y_full.end(), static_cast<std::size_t>(w[l]), y[l]);
    }
    const double b = rng.uniform01() * static_cast<double>(y_full.size());
    const auto weighted = project_capped_simplex(y, w, b);
    const auto full = project_capped_simplex(y_full, b);
    std::size_t k = 0;
    for (std::size_t l = 0; l < levels; ++l)
      for (int c = 0; c < static_cast<int>(w[l]); ++c, ++k)
        EXPECT_NEAR(weighted[l], full[k], 1e-12);
  }
}

TEST(Objective, Examples) {
  EXPECT_NEAR(objective(Mechanism::CFS, std::vector<double>{0.8, 0.2},
                        TransactionPool({4, 1}), GameConfig(2, 1)),
              2.10, 1e-12);
  EXPECT_EQ(objective(Mechanism::RFA, std::vector<double>{0, 0, 0},
                      TransactionPool({3, 2, 1}), GameConfig(2, 1)),
            0.0);
  EXPECT_NEAR(objective(Mechanism::RFA, std::vector<double>{1.0},
                        TransactionPool({1}), GameConfig(2, 1)),
              0.75, 1e-15);
  EXPECT_THROW(objective(Mechanism::RFA, std::vector<double>{1.0},
                         TransactionPool({1, 2}), GameConfig(2, 1)),
               std::invalid_argument);
}

TEST(Gradient, Examples) {
  const auto cfs = gradient(Mechanism::CFS, std::vector<double>{0.8, 0.2},
                            TransactionPool({4, 1}), GameConfig(2, 1));
  EXPECT_NEAR(cfs[0], 0.8, 1e-12);
  EXPECT_NEAR(cfs[1], 0.8, 1e-12);
  const auto rfa = gradient(Mechanism::RFA, std::vector<double>{5.0 / 7, 2.0 / 7},
                            TransactionPool({4, 3}), GameConfig(2, 1));
  EXPECT_NEAR(rfa[0], 36.0 / 14, 1e-12);
  EXPECT_NEAR(rfa[1], 36.0 / 14, 1e-12);
}

TEST(Gradient, MatchesCentralDifferences) {
  Xoshiro256 rng(5);
  constexpr double h = 1e-6;
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS}) {
    for (int trial = 0; trial < 30; ++trial) {
      const auto inst = testing_support::random_instance(900 + trial, 12, 20);
      auto p = random_interior(rng, inst.pool.size());
      const auto g = gradient(mech, p, inst.pool, inst.config);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = p[i];
        p[i] = x + h;
        const double up = objective(mech, p, inst.pool, inst.config);
        p[i] = x - h;
        const double down = objective(mech, p, inst.pool, inst.config);
        p[i] = x;
        const double fd = (up - down) / (2 * h);
        EXPECT_NEAR(fd, g[i], 1e-5 * std::max(std::abs(g[i]), 1e-3))
            << "trial " << trial << " i " << i;
      }
    }
  }
}

TEST(KktResidual, Examples) {
  const TransactionPool four_one({4, 1});
  const GameConfig two(2, 1);
  EXPECT_LE(kkt_residual(Mechanism::CFS, std::vector<double>{0.8, 0.2}, four_one, two), 1e-12);
  EXPECT_LE(kkt_residual(Mechanism::RFA, std::vector<double>{1.0, 0.0}, four_one, two), 1e-12);
  EXPECT_NEAR(kkt_residual(Mechanism::RFA, std::vector<double>{0.5, 0.5}, four_one, two),
              1.125, 1e-12);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.tol = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.step_size = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

class SolveBothPotentials : public ::testing::TestWithParam<AscentPotential> {
 protected:
  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.potential = GetParam();
    return cfg;
  }
};

TEST_P(SolveBothPotentials, HandEquilibria) {
  const auto cfs = solve_ne(Mechanism::CFS, TransactionPool({4, 1}), GameConfig(2, 1), solver());
  EXPECT_TRUE(cfs.converged);
  EXPECT_NEAR(cfs.strategy[0], 0.8, 1e-6);
  EXPECT_NEAR(cfs.strategy[1], 0.2, 1e-6);

  const auto rfa41 = solve_ne(Mechanism::RFA, TransactionPool({4, 1}), GameConfig(2, 1), solver());
  EXPECT_TRUE(rfa41.converged);
  EXPECT_NEAR(rfa41.strategy[0], 1.0, 1e-6);
  EXPECT_NEAR(rfa41.strategy[1], 0.0, 1e-6);

  const auto rfa43 = solve_ne(Mechanism::RFA, TransactionPool({4, 3}), GameConfig(2, 1), solver());
  EXPECT_TRUE(rfa43.converged);
  EXPECT_NEAR(rfa43.strategy[0], 5.0 / 7, 1e-6);
  EXPECT_NEAR(rfa43.strategy[1], 2.0 / 7, 1e-6);
}

TEST_P(SolveBothPotentials, HomogeneousFeesSplitEvenly) {
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS}) {
    const auto r = solve_ne(mech, TransactionPool(std::vector<double>(10, 3.0)),
                            GameConfig(4, 5), solver());
    for (double p : r.strategy.values()) EXPECT_NEAR(p, 0.5, 1e-12);
  }
}

TEST_P(SolveBothPotentials, ClimbedPotentialNeverDecreases) {
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto inst = testing_support::random_instance(300 + seed, 60, 10);
      const FeeLevels levels = group_fee_levels(inst.pool);
      double previous = ascent_potential(
          mech, GetParam(),
          std::vector<double>(inst.pool.size(),
                              static_cast<double>(inst.config.block_capacity()) /
                                  static_cast<double>(inst.pool.size())),
          inst.pool, inst.config);
      int drops = 0;
      solve_ne(mech, inst.pool, inst.config, solver(),
               [&](int, std::span<const double> level_p) {
                 const double value = ascent_potential(
                     mech, GetParam(), expand_levels(levels, level_p), inst.pool,
                     inst.config);
                 if (value < previous - 1e-12 * std::max(1.0, std::abs(previous))) ++drops;
                 previous = value;
               });
      EXPECT_EQ(drops, 0) << "seed " << seed;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Potentials, SolveBothPotentials,
                         ::testing::Values(AscentPotential::Rescaled,
                                           AscentPotential::Direct),
                         [](const auto& info) {
                           return info.param == AscentPotential::Rescaled
                                      ? std::string("Rescaled")
                                      : std::string("Direct");
                         });

TEST(SolveNe, AgreesWithTheoremOnSmallInstances) {
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS}) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto inst = testing_support::random_instance(7000 + seed, 40, 6);
      const auto ne = solve_ne(mech, inst.pool, inst.config);
      const auto sol = theorem_equilibrium(group_fee_levels(inst.pool), inst.config, mech);
      EXPECT_TRUE(ne.converged) << seed;
      EXPECT_LE(oracle::max_abs_diff(ne.strategy.values(), sol.p.values()), 1e-6) << seed;
    }
  }
}

TEST(SolveNe, ArgmaxIsScaleInvariant) {
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto inst = testing_support::random_instance(40 + seed, 60, 10);
      std::vector<double> scaled = to_vec(inst.pool.fees());
      for (double& v : scaled) v *= 37.5;
      const auto a = solve_ne(mech, inst.pool, inst.config);
      const auto b = solve_ne(mech, TransactionPool(scaled), inst.config);
      EXPECT_LE(oracle::max_abs_diff(a.strategy.values(), b.strategy.values()), 1e-8)
          << "seed " << seed;
    }
  }
}

// The direct potentials share the maximizer but are badly conditioned: the
// fixed step crawls where payoff curvature is small, so they need far more
// iterations than the rescaled ones on the same instance.
TEST(SolveNe, DirectPotentialNeedsMoreIterations) {
  SolverConfig direct;
  direct.potential = AscentPotential::Direct;
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS}) {
    const auto inst = testing_support::random_instance(7003, 40, 6);
    const auto fast = solve_ne(mech, inst.pool, inst.config);
    const auto slow = solve_ne(mech, inst.pool, inst.config, direct);
    EXPECT_TRUE(fast.converged);
    EXPECT_GT(slow.iterations, 5 * fast.iterations);
  }
}

TEST(SolveNe, ReportsNonConvergenceWithFeasibleIterate) {
  SolverConfig cfg;
  cfg.max_iters = 1;
  const auto inst = testing_support::random_instance(17, 100, 10);
  const auto r = solve_ne(Mechanism::CFS, inst.pool, inst.config, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  double sum = 0.0;
  for (double p : r.strategy.values()) sum += p;
  EXPECT_NEAR(sum, inst.config.block_capacity(), 1e-9);
}

TEST(SolveNe, LargeFeesAndValidatorCountsConverge) {
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto inst = testing_support::random_instance(60 + seed, 200, 20, 1000);
      const auto r = solve_ne(mech, inst.pool, inst.config);
      EXPECT_TRUE(r.converged) << seed;
      EXPECT_LE(r.kkt_residual, 1e-6 * inst.pool.max_fee());
    }
  }
}

TEST(SolveNe, FullCapacityIsImmediate) {
  const auto r = solve_ne(Mechanism::RFA, TransactionPool({5, 3, 1}), GameConfig(3, 3));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  for (double p : r.strategy.values()) EXPECT_EQ(p, 1.0);
}

TEST(SolveNe, RejectsInfeasibleCapacity) {
  EXPECT_THROW(solve_ne(Mechanism::RFA, TransactionPool({5}), GameConfig(3, 2)),
               InfeasibleCapacity);
}

TEST(AscentPotential, DirectIsTheObjective) {
  const TransactionPool pool({4, 1});
  const GameConfig cfg(2, 1);
  const std::vector<double> p{0.7, 0.3};
  for (Mechanism mech : {Mechanism::RFA, Mechanism::CFS})
    EXPECT_EQ(ascent_potential(mech, AscentPotential::Direct, p, pool, cfg),
              objective(mech, p, pool, cfg));
}

TEST(AscentPotential, RescaledGradientsMatchDifferences) {
  // d/dp of the rescaled potentials: log v + log alpha_hat(p) (RFA) and
  // v^(1/(N-1)) (1 - p) (CFS).
  const TransactionPool pool({7, 2, 1});
  const GameConfig cfg(4, 1);
  constexpr double h = 1e-5;
  for (double x : {0.1, 0.4, 0.8}) {
    std::vector<double> p{x, 0.3, 0.2};
    auto value = [&](Mechanism mech, double xi) {
      p[0] = xi;
      return ascent_potential(mech, AscentPotential::Rescaled, p, pool, cfg);
    };
    const double fd_rfa = (value(Mechanism::RFA, x + h) - value(Mechanism::RFA, x - h)) / (2 * h);
    EXPECT_NEAR(fd_rfa, std::log(7.0) + std::log(alpha_hat(x, 4)), 1e-7);
    const double fd_cfs = (value(Mechanism::CFS, x + h) - value(Mechanism::CFS, x - h)) / (2 * h);
    EXPECT_NEAR(fd_cfs, std::cbrt(7.0) * (1 - x), 1e-7);
  }
}
