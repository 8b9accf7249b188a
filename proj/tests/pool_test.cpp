#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "dagsel/errors.hpp"
#include "dagsel/pool.hpp"

using namespace dagsel;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
  const fs::path path = fs::temp_directory_path() / ("dagsel_pool_" + name);
  std::ofstream(path) << body;
  return path;
}

std::vector<std::pair<double, std::size_t>> as_pairs(const FeeLevels& levels) {
  std::vector<std::pair<double, std::size_t>> out;
  for (const auto& lv : levels.levels()) out.emplace_back(lv.value, lv.count);
  return out;
}

}  // namespace

TEST(GameConfig, RejectsDegenerateParameters) {
  EXPECT_THROW(GameConfig(1, 1), std::invalid_argument);
  EXPECT_THROW(GameConfig(2, 0), std::invalid_argument);
  EXPECT_NO_THROW(GameConfig(2, 1));
  EXPECT_THROW(require_capacity(GameConfig(2, 3), 2), InfeasibleCapacity);
  EXPECT_NO_THROW(require_capacity(GameConfig(2, 2), 2));
}

TEST(TransactionPool, SortsDescendingAndRejectsBadFees) {
  const TransactionPool pool({1, 4, 2});
  EXPECT_EQ(std::vector<double>(pool.fees().begin(), pool.fees().end()),
            (std::vector<double>{4, 2, 1}));
  EXPECT_EQ(pool.max_fee(), 4);
  EXPECT_EQ(pool.total_fee(), 7);
  EXPECT_THROW(TransactionPool({}), std::invalid_argument);
  EXPECT_THROW(TransactionPool({1, 0}), std::invalid_argument);
  EXPECT_THROW(TransactionPool({1, -2}), std::invalid_argument);
  EXPECT_THROW(TransactionPool({1, INFINITY}), std::invalid_argument);
}

TEST(GroupFeeLevels, Examples) {
  using P = std::vector<std::pair<double, std::size_t>>;
  EXPECT_EQ(as_pairs(group_fee_levels(TransactionPool({4, 1}))), (P{{4, 1}, {1, 1}}));
  EXPECT_EQ(as_pairs(group_fee_levels(TransactionPool({5, 5, 5}))), (P{{5, 3}}));
  EXPECT_EQ(as_pairs(group_fee_levels(TransactionPool({10, 10, 3, 3, 3, 1}))),
            (P{{10, 2}, {3, 3}, {1, 1}}));
}

TEST(GroupFeeLevels, ExpansionReproducesPool) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pool = zipf_pool({7, 0.8, 300, seed});
    const auto levels = group_fee_levels(pool);
    EXPECT_EQ(levels.transaction_count(), pool.size());
    EXPECT_EQ(levels.expand(),
              std::vector<double>(pool.fees().begin(), pool.fees().end()));
  }
}

TEST(FeeLevels, RejectsUnsortedOrEmptyLevels) {
  EXPECT_THROW(FeeLevels({{1, 1}, {2, 1}}), std::invalid_argument);
  EXPECT_THROW(FeeLevels({{2, 0}}), std::invalid_argument);
}

TEST(ZipfPool, LengthRangeAndDeterminism) {
  const ZipfSpec spec{10, 0.7, 1000, 5};
  const auto a = zipf_pool(spec), b = zipf_pool(spec);
  ASSERT_EQ(a.size(), 1000u);
  EXPECT_TRUE(std::equal(a.fees().begin(), a.fees().end(), b.fees().begin()));
  for (double v : a.fees()) {
    EXPECT_GE(v, 1.0);
    EXPECT_LE(v, 10.0);
    EXPECT_EQ(v, std::floor(v));
  }
  const auto c = zipf_pool({10, 0.7, 1000, 6});
  EXPECT_FALSE(std::equal(a.fees().begin(), a.fees().end(), c.fees().begin()));
}

TEST(ZipfPool, UniformAtShapeZeroPassesChiSquare) {
  // Counts pooled over 50 seeds; 9 degrees of freedom, 0.999 quantile.
  constexpr double kCritical = 27.877;
  std::vector<double> counts(10, 0.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (double v : zipf_pool({10, 0.0, 1000, seed}).fees())
      counts[static_cast<std::size_t>(v) - 1] += 1.0;
  const double expected = 50.0 * 1000 / 10;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, kCritical);
}

TEST(ZipfPool, TwoValueShapeOneConvergesToTwoThirds) {
  double ones = 0.0, total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (double v : zipf_pool({2, 1.0, 10000, seed}).fees()) {
      ones += v == 1.0;
      total += 1.0;
    }
  // Binomial standard error at n = 200000 is about 0.001.
  EXPECT_NEAR(ones / total, 2.0 / 3.0, 0.005);
}

TEST(ZipfPool, EmpiricalFrequenciesMatchWeights) {
  for (double s : {0.0, 0.5, 1.0}) {
    const auto probs = zipf_probabilities(10, s);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      std::vector<double> counts(10, 0.0);
      for (double v : zipf_pool({10, s, 10000, seed}).fees())
        counts[static_cast<std::size_t>(v) - 1] += 1.0;
      for (int i = 0; i < 10; ++i)
        EXPECT_LT(std::abs(counts[i] / 10000 - probs[i]), 0.02) << s;
    }
  }
}

TEST(ZipfProbabilities, NormalizedPowerWeights) {
  const auto p = zipf_probabilities(3, 1.0);
  const double c = 1.0 + 0.5 + 1.0 / 3.0;
  EXPECT_NEAR(p[0], 1.0 / c, 1e-15);
  EXPECT_NEAR(p[1], 0.5 / c, 1e-15);
  EXPECT_NEAR(p[2], (1.0 / 3.0) / c, 1e-15);
  EXPECT_THROW(zipf_probabilities(0, 1.0), std::invalid_argument);
  EXPECT_THROW(zipf_probabilities(3, -1.0), std::invalid_argument);
}

TEST(ValidateMarginals, Examples) {
  const GameConfig one(2, 1);
  EXPECT_NO_THROW(validate_marginals({0.5, 0.5}, one));
  try {
    validate_marginals({1.2, -0.2}, one);
    FAIL() << "expected BoundViolation";
  } catch (const BoundViolation& e) {
    EXPECT_EQ(e.index(), 0u);
  }
  EXPECT_THROW(validate_marginals({0.5, 0.4}, one), SumMismatch);
  EXPECT_THROW(validate_marginals({0.5, std::nan("")}, one), BoundViolation);
}

TEST(ValidateMarginals, SumToleranceIsRelative) {
  const GameConfig cfg(2, 100);
  std::vector<double> q(200, 0.5);
  q[0] += 5e-8;  // 5e-10 relative
  EXPECT_NO_THROW(validate_marginals(q, cfg));
  q[0] += 2e-7;
  EXPECT_THROW(validate_marginals(q, cfg), SumMismatch);
}

TEST(PoolFiles, TextAndJsonRoundTrip) {
  const TransactionPool pool({3, 1.5, 7});
  for (const char* ext : {".txt", ".csv", ".json"}) {
    const fs::path path = fs::temp_directory_path() / (std::string("dagsel_rt") + ext);
    write_pool(path, pool);
    const auto back = read_pool(path);
    EXPECT_TRUE(std::equal(back.fees().begin(), back.fees().end(),
                           pool.fees().begin(), pool.fees().end()))
        << ext;
    fs::remove(path);
  }
}

TEST(PoolFiles, ToleratesBlankLinesAndTrailingCommas) {
  const auto path = temp_file("loose.csv", "4,\n\n1\r\n");
  const auto pool = read_pool(path);
  EXPECT_EQ(pool.size(), 2u);
  EXPECT_EQ(pool.max_fee(), 4);
}

TEST(PoolFiles, ErrorsCarryThePath) {
  const auto bad = temp_file("bad.txt", "4\nabc\n");
  try {
    read_pool(bad);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
  EXPECT_THROW(read_pool(temp_file("obj.json", "{\"a\":1}")), IoError);
  EXPECT_THROW(read_pool(temp_file("neg.json", "[1,-1]")), IoError);
  EXPECT_THROW(read_pool(temp_file("x.dat", "1\n")), IoError);
  EXPECT_THROW(read_pool("/nonexistent/dir/pool.txt"), IoError);
}
