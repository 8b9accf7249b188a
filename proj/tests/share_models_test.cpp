#include <gtest/gtest.h>

#include <cmath>

#include "dagsel/errors.hpp"
#include "dagsel/share_models.hpp"
#include "oracles.hpp"

using namespace dagsel;

TEST(RfaShare, HandValues) {
  EXPECT_NEAR(rfa_share(1.0, 10), 0.1, 1e-15);
  EXPECT_NEAR(rfa_share(0.5, 2), 0.75, 1e-15);
  EXPECT_NEAR(rfa_share(0.1, 10), 0.65132156, 1e-8);
}

TEST(RfaShare, SumFormHandValues) {
  EXPECT_NEAR(rfa_share_sum_form(1.0, 10), 0.1, 1e-15);
  EXPECT_NEAR(rfa_share_sum_form(0.5, 2), 0.75, 1e-15);
}

TEST(RfaShare, MatchesLongDoubleBinomialOracle) {
  for (int n = 2; n <= 50; n += 3)
    for (double p : {1e-12, 1e-9, 1e-7, 1e-4, 0.01, 0.3, 0.77, 1.0})
      EXPECT_NEAR(rfa_share(p, n), oracle::rfa_share(p, n), 1e-12)
          << "p=" << p << " n=" << n;
}

TEST(RfaShare, AppendixIdentityOnGrid) {
  int points = 0;
  for (int n = 2; n <= 50; ++n)
    for (int i = 1; i <= 100; ++i) {
      const double p = i / 100.0;
      ASSERT_NEAR(rfa_share(p, n), rfa_share_sum_form(p, n), 1e-12)
          << "p=" << p << " n=" << n;
      ++points;
    }
  EXPECT_GE(points, 1000);
}

TEST(RfaShare, RejectsOutOfDomain) {
  EXPECT_THROW(rfa_share(0.0, 10), DomainError);
  EXPECT_THROW(rfa_share(1.5, 10), DomainError);
  EXPECT_THROW(rfa_share(0.5, 1), DomainError);
  EXPECT_THROW(rfa_share(std::nan(""), 3), DomainError);
}

TEST(AlphaHat, UsesContinuousLimitAtZero) {
  EXPECT_DOUBLE_EQ(alpha_hat(0.0, 10), 1.0);
  EXPECT_NEAR(alpha_hat(1.0, 10), 0.1, 1e-15);
  EXPECT_NEAR(alpha_hat(0.5, 2), 0.75, 1e-15);
  // Continuous from the right.
  EXPECT_NEAR(alpha_hat(1e-10, 10), 1.0, 1e-8);
}

TEST(CfsShare, HandValues) {
  EXPECT_NEAR(cfs_share(0.0, 10), 0.1, 1e-15);
  EXPECT_EQ(cfs_share(1.0, 5), 0.0);
  EXPECT_NEAR(cfs_share(0.5, 3), 1.0 / 12.0, 1e-15);
}

TEST(CfsInverse, HandValues) {
  EXPECT_NEAR(cfs_share_inverse(0.1, 10), 0.0, 1e-15);
  EXPECT_NEAR(cfs_share_inverse(0.0, 5), 1.0, 1e-15);
  EXPECT_NEAR(cfs_share_inverse(1.0 / 12.0, 3), 0.5, 1e-12);
  EXPECT_THROW(cfs_share_inverse(0.2, 10), DomainError);
  EXPECT_THROW(cfs_share_inverse(-0.01, 10), DomainError);
}

TEST(RfaInverse, HandValues) {
  EXPECT_NEAR(rfa_share_inverse(1.0, 10), 0.0, 1e-12);
  EXPECT_NEAR(rfa_share_inverse(0.1, 10), 1.0, 1e-12);
  EXPECT_NEAR(rfa_share_inverse(0.75, 2), 0.5, 1e-12);
  EXPECT_THROW(rfa_share_inverse(0.05, 10), DomainError);
  EXPECT_THROW(rfa_share_inverse(1.01, 10), DomainError);
}

TEST(ShareInverse, RoundTrip) {
  for (int n : {2, 3, 5, 10, 20, 50}) {
    for (int i = 0; i <= 200; ++i) {
      const double t = i / 200.0;
      const double x_rfa = 1.0 / n + t * (1.0 - 1.0 / n);
      EXPECT_NEAR(alpha_hat(rfa_share_inverse(x_rfa, n), n), x_rfa, 1e-10);
      const double x_cfs = t / n;
      EXPECT_NEAR(cfs_share(cfs_share_inverse(x_cfs, n), n), x_cfs, 1e-10);
    }
  }
}

TEST(RfaPotential, HandValues) {
  EXPECT_EQ(rfa_potential(0.0, 7), 0.0);
  EXPECT_NEAR(rfa_potential(0.5, 2), 0.4375, 1e-15);
  EXPECT_NEAR(rfa_potential(1.0, 2), 0.75, 1e-15);
}

TEST(RfaPotential, EqualsHarmonicNumberOverNAtOne) {
  for (int n : {2, 10, 60, 61, 200}) {
    double h = 0.0;
    for (int k = 1; k <= n; ++k) h += 1.0 / k;
    EXPECT_NEAR(rfa_potential(1.0, n), h / n, 1e-13) << n;
  }
}

TEST(RfaPotential, DerivativeIsAlphaHat) {
  constexpr double h = 1e-6;
  for (int n : {2, 5, 10, 40, 100})
    for (int i = 1; i < 20; ++i) {
      const double p = i / 20.0;
      const double fd = (rfa_potential(p + h, n) - rfa_potential(p - h, n)) / (2 * h);
      EXPECT_NEAR(fd, alpha_hat(p, n), 1e-6) << "p=" << p << " n=" << n;
    }
}

TEST(ShareFunctions, StrictlyDecreasing) {
  for (int n : {2, 3, 10, 50})
    for (int i = 1; i < 100; ++i) {
      const double p1 = i / 100.0, p2 = (i + 1) / 100.0;
      EXPECT_GT(rfa_share(p1, n), rfa_share(p2, n));
      EXPECT_GT(cfs_share(p1, n), cfs_share(p2, n));
    }
}

TEST(ShareFunctions, Bounds) {
  for (int n : {2, 3, 10, 50})
    for (int i = 1; i <= 100; ++i) {
      const double p = i / 100.0;
      EXPECT_GE(rfa_share(p, n), 1.0 / n - 1e-15);
      EXPECT_LE(rfa_share(p, n), 1.0);
      EXPECT_GE(cfs_share(p, n), 0.0);
      EXPECT_LE(cfs_share(p, n), 1.0 / n);
    }
}

TEST(ShareModel, DispatchesByMechanism) {
  const ShareModel rfa(Mechanism::RFA, 4), cfs(Mechanism::CFS, 4);
  EXPECT_DOUBLE_EQ(rfa.share(0.3), alpha_hat(0.3, 4));
  EXPECT_DOUBLE_EQ(cfs.share(0.3), cfs_share(0.3, 4));
  EXPECT_DOUBLE_EQ(rfa.at_zero(), 1.0);
  EXPECT_DOUBLE_EQ(rfa.at_one(), 0.25);
  EXPECT_DOUBLE_EQ(cfs.at_zero(), 0.25);
  EXPECT_DOUBLE_EQ(cfs.at_one(), 0.0);
  EXPECT_EQ(rfa.clamped_inverse(2.0), 0.0);
  EXPECT_EQ(rfa.clamped_inverse(0.1), 1.0);
  EXPECT_EQ(cfs.clamped_inverse(-1.0), 1.0);
}

TEST(MechanismNames, RoundTrip) {
  EXPECT_EQ(to_string(Mechanism::RFA), "rfa");
  EXPECT_EQ(to_string(Mechanism::CFS), "cfs");
  EXPECT_EQ(parse_mechanism("RFA"), Mechanism::RFA);
  EXPECT_EQ(parse_mechanism("cfs"), Mechanism::CFS);
  EXPECT_FALSE(parse_mechanism("xyz").has_value());
}
