#include <gtest/gtest.h>

#include "robustdeg/concentration.hpp"
#include "robustdeg/sampling.hpp"

using namespace robustdeg;

TEST(AverageDegree, HoldsAtCalibratedConstant) {
  const auto r = verify_average_degree(1000, 10, 200, 3.0, 1);
  EXPECT_EQ(r.lemma_id, "average_degree");
  EXPECT_EQ(r.trials, 200);
  EXPECT_EQ(r.violations, 0);
  EXPECT_LE(r.empirical_max_ratio, 1.0);
}

TEST(AverageDegree, EmptyRegime) {
  const auto r = verify_average_degree(10, 0, 20, 3.0, 1);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.empirical_max_ratio, 0.0);
}

TEST(AverageDegree, TinyConstantFails) {
  const auto r = verify_average_degree(1000, 10, 200, 0.01, 1);
  EXPECT_GE(r.violations, 180);
  EXPECT_GT(verify_average_degree(1000, 10, 200, 3.0 / 1000, 1).violations, 0);
}

TEST(DegreeSubsetSum, SortedPrefixMatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 5 + seed % 11;  // up to 15
    const Graph g = sample_er(n, 3, seed);
    const double mean = (1.0 - 1.0 / static_cast<double>(n)) * 3.0;
    const auto fast = exact_degree_subset_sums(g, mean);
    std::vector<double> slow(n + 1, 0.0);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      double s = 0;
      for (Node v = 0; v < n; ++v)
        if (mask >> v & 1u) s += static_cast<double>(g.degree(v)) - mean;
      auto& slot = slow[static_cast<std::size_t>(std::popcount(mask))];
      slot = std::max(slot, std::abs(s));
    }
    for (std::size_t k = 1; k <= n; ++k) EXPECT_NEAR(fast[k], slow[k], 1e-9);
  }
}

TEST(DegreeSubsetSum, HoldsAtCalibratedConstant) {
  const auto r = verify_degree_subset_sum(1000, 5, 50, 4.0, 2);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.params.at("exhaustive_edge_check"), 0.0);
}

TEST(DegreeSubsetSum, ExhaustiveEdgeCheck) {
  const auto r = verify_degree_subset_sum(14, 3, 50, 4.0, 2);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.params.at("exhaustive_edge_check"), 1.0);
  EXPECT_GT(verify_degree_subset_sum(14, 3, 50, 4.0 / 1000, 2).violations, 0);
}

TEST(DegreeSubsetSum, EmptyRegime) {
  EXPECT_EQ(verify_degree_subset_sum(200, 0, 5, 1.0, 3).violations, 0);
}

TEST(DegreeSubsetSum, TinyConstantFails) {
  EXPECT_GT(verify_degree_subset_sum(1000, 5, 50, 4.0 / 1000, 2).violations, 0);
}

TEST(HighDegreeCount, HoldsAtCalibratedConstant) {
  EXPECT_EQ(verify_high_degree_count(2000, 10, 100, 8.0, 3).violations, 0);
}

TEST(HighDegreeCount, CompleteRegime) {
  EXPECT_EQ(verify_high_degree_count(50, 50, 5, 8.0, 3).violations, 0);
}

TEST(HighDegreeCount, TinyConstantFails) {
  EXPECT_GT(verify_high_degree_count(2000, 10, 100, 0.001, 3).violations, 0);
  EXPECT_THROW(verify_high_degree_count(100, 0, 5, 1.0, 3), std::invalid_argument);
}

TEST(Spectral, HoldsAtCalibratedConstant) {
  const auto r = verify_spectral(2000, 3, 20, 10.0, 4);
  EXPECT_EQ(r.violations, 0);
  EXPECT_GT(r.params.at("plain_norm_max"), 0.0);
  EXPECT_GT(verify_spectral(2000, 3, 5, 10.0 / 1000, 4).violations, 0);
}

TEST(Spectral, CompleteGraphRegime) {
  // d0 = n - 1: E A has off-diagonal (n-1)/n, so A - E A = (1/n)(J - I) - ... has norm <= 1.
  const auto r = verify_spectral(40, 39, 5, 1.0, 5);
  EXPECT_EQ(r.violations, 0);
}

TEST(Trials, DeterministicAndParallelSafe) {
  const auto a = verify_spectral(500, 4, 6, 10.0, 11, 1);
  const auto b = verify_spectral(500, 4, 6, 10.0, 11, 3);
  EXPECT_EQ(a.empirical_max_ratio, b.empirical_max_ratio);
  EXPECT_EQ(a.violations, b.violations);
  EXPECT_THROW(verify_average_degree(100, 3, 0, 1.0, 1), std::invalid_argument);
}

// Window probabilities frozen from a 50-digit mpmath evaluation of the pmf.
TEST(BinomialQuantile, PaperRegime) {
  const auto r = verify_binomial_quantile(100000000, 10000, 0.01);
  EXPECT_EQ(r.trials, 2);
  EXPECT_EQ(r.violations, 0);
  EXPECT_NEAR(r.params.at("lower_probability"), 0.34123875505763361, 1e-12);
  EXPECT_NEAR(r.params.at("upper_probability"), 0.3399010533938173, 1e-12);

  const auto h = verify_binomial_quantile(100000000, 10000, 0.005);
  EXPECT_EQ(h.violations, 0);
  EXPECT_NEAR(h.params.at("lower_probability"), 0.19146316937756792, 1e-12);
  EXPECT_NEAR(h.params.at("upper_probability"), 0.19100551093366526, 1e-12);
}

TEST(BinomialQuantile, DeskRegime) {
  const auto r = verify_binomial_quantile(100000, 100, 0.01);
  EXPECT_EQ(r.violations, 0);
  EXPECT_NEAR(r.params.at("lower_probability"), 0.34045908037563805, 1e-12);
  EXPECT_NEAR(r.params.at("upper_probability"), 0.3264176241608635, 1e-12);
}

TEST(BinomialQuantile, SmallN) {
  const auto r = verify_binomial_quantile(50, 10, 0.02);
  EXPECT_NEAR(r.params.at("lower_probability"), 0.43808405227959535, 1e-12);
  EXPECT_NEAR(r.params.at("upper_probability"), 0.40199892421667629, 1e-12);
}

TEST(BinomialQuantile, EmptyWindowNotApplicable) {
  const auto r = verify_binomial_quantile(1000, 100, 0.0005);  // 100 eta sqrt(d) = 0.5
  EXPECT_EQ(r.trials, 0);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.params.at("applicable"), 0.0);
  EXPECT_EQ(r.params.at("lower_probability"), 0.0);
}

TEST(BinomialQuantile, Errors) {
  EXPECT_THROW(verify_binomial_quantile(10, 11, 0.1), std::invalid_argument);
  EXPECT_THROW(verify_binomial_quantile(10, 0, 0.1), std::invalid_argument);
  // d = n: X = n surely, both windows have probability 0.
  const auto r = verify_binomial_quantile(100, 100, 0.05);
  EXPECT_EQ(r.params.at("lower_probability"), 0.0);
  EXPECT_EQ(r.violations, 2);
}

TEST(BinomialQuantile, PmfSumsToOne) {
  EXPECT_NEAR(binomial_window_probability(1000, 0.01, 0, 1000), 1.0, 1e-12);
  EXPECT_NEAR(binomial_window_probability(30, 0.5, 0, 30), 1.0, 1e-14);
  EXPECT_NEAR(std::exp(binomial_log_pmf(10, 3, 0.2)), 0.20132659200000003, 1e-15);
}
