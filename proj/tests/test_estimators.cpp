#include <gtest/gtest.h>

#include <random>

#include "robustdeg/adversary.hpp"
#include "robustdeg/estimators.hpp"
#include "robustdeg/sampling.hpp"

using namespace robustdeg;

namespace {

/// Plain pruning loop: exact certificate every round, no skipping.
EstimateResult reference_prune(const Graph& a, double eta, double c_delta) {
  const std::size_t n = a.size();
  const std::size_t budget = fraction_budget(eta, n);
  std::vector<char> removed(n, 0);
  std::size_t removed_count = 0;
  double best_slack = std::numeric_limits<double>::infinity();
  EstimateResult best;
  for (;;) {
    std::vector<Node> keep;
    for (Node v = 0; v < n; ++v)
      if (!removed[v]) keep.push_back(v);
    const Graph sub = induced_subgraph(a, NodeSet(n, keep));
    const double d_fill = repaired_average_degree(n, keep.size(), sub.edge_count());
    const double gamma = kept_scale_gamma(eta, n, keep.size());
    CertificateOptions opts;
    opts.tol = 1e-10;
    const auto r = goodness_certificate(sub, gamma, c_delta, opts);
    if (r.satisfied || r.slack() < best_slack) {
      best.d_hat = d_fill;
      best.pruned = NodeSet::from_mask(removed);
      best.certificate = r;
      best_slack = r.slack();
    }
    if (r.satisfied || removed_count >= budget) return best;
    const auto deg = degrees(sub);
    const double avg = average_degree(sub);
    std::size_t pick = 0;
    for (std::size_t i = 1; i < keep.size(); ++i)
      if (std::abs(static_cast<double>(deg[i]) - avg) > std::abs(static_cast<double>(deg[pick]) - avg))
        pick = i;
    removed[keep[pick]] = 1;
    ++removed_count;
  }
}

}  // namespace

TEST(Baselines, NaiveMean) {
  EXPECT_DOUBLE_EQ(naive_mean(Graph::complete(4)).d_hat, 3.0);
  EXPECT_DOUBLE_EQ(naive_mean(Graph::empty(6)).d_hat, 0.0);
  const auto inst = corrupt(Graph::empty(10), 0.2, AdversaryKind::clique_plant(), 5);
  EXPECT_DOUBLE_EQ(naive_mean(inst.corrupted).d_hat, 3.4);
  EXPECT_TRUE(naive_mean(Graph::complete(4)).pruned.empty());
}

TEST(Baselines, MedianDegree) {
  EXPECT_DOUBLE_EQ(median_degree(Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}})).d_hat, 1.0);
  EXPECT_DOUBLE_EQ(median_degree(Graph::complete(4)).d_hat, 3.0);
  EXPECT_DOUBLE_EQ(median_degree(Graph::from_edges(3, {{0, 1}, {1, 2}})).d_hat, 1.0);
  // Even length: midpoint of the central order statistics.
  EXPECT_DOUBLE_EQ(median_degree(Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}})).d_hat,
                   2.5);
  EXPECT_DOUBLE_EQ(median_degree(Graph::from_edges(4, {{0, 1}, {0, 2}, {2, 3}})).d_hat, 1.5);
}

TEST(BinomialMedian, Examples) {
  const std::vector<std::int64_t> a{3, 1, 4, 1, 5};
  EXPECT_EQ(binomial_median(a), 3.0);
  const std::vector<std::int64_t> b{7, 7, 7};
  EXPECT_EQ(binomial_median(b), 7.0);
  EXPECT_THROW(binomial_median(std::span<const std::int64_t>{}), std::invalid_argument);
}

TEST(BinomialMedian, PermutationAndShift) {
  Xoshiro256 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::int64_t> v(1 + rng.below(30));
    for (auto& x : v) x = static_cast<std::int64_t>(rng.below(100));
    const double m = binomial_median(v);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_EQ(binomial_median(v), m);
    for (auto& x : v) x += 5;
    EXPECT_EQ(binomial_median(v), m + 5);
  }
}

TEST(BinomialMedian, CorruptedSamplesDeskScale) {
  // m = 20000 draws of Binomial(1e5, 1e-3); 1% replaced by 1e5.
  int within = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Xoshiro256 rng(derive_seed(99, t));
    std::binomial_distribution<std::int64_t> bin(100000, 1e-3);
    std::vector<std::int64_t> s(20000);
    for (auto& x : s) x = bin(rng);
    for (std::size_t i = 0; i < 200; ++i) s[i] = 100000;
    within += std::abs(binomial_median(s) - 100.0) <= 10.0;
  }
  EXPECT_GE(within, 99);
}

TEST(Repair, FixedPointIdentity) {
  for (std::size_t n : {10u, 37u, 2000u})
    for (std::size_t kept : {n, n - 1, n / 2})
      for (std::size_t e : {0u, 3u, 17u}) {
        const double d = repaired_average_degree(n, kept, e);
        const double nn = static_cast<double>(n), kk = static_cast<double>(kept);
        EXPECT_NEAR(d * nn, 2.0 * static_cast<double>(e) + (nn * nn - kk * kk) * d / nn,
                    1e-9 * std::max(1.0, d * nn));
      }
  EXPECT_EQ(repaired_average_degree(5, 0, 0), 0.0);
}

TEST(Repair, KeptScaleGamma) {
  EXPECT_DOUBLE_EQ(kept_scale_gamma(0.1, 100, 100), 0.2);
  EXPECT_DOUBLE_EQ(kept_scale_gamma(0.1, 100, 80), 0.25);
  EXPECT_DOUBLE_EQ(kept_scale_gamma(0.45, 100, 60), 1.0);
}

TEST(BruteForce, ZeroEtaIsAverageDegree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = sample_er(12, 4, seed);
    const auto r = brute_force_estimate(g, 0.0, 100.0);
    EXPECT_EQ(r.d_hat, average_degree(g));
    EXPECT_TRUE(r.pruned.empty());
  }
}

TEST(BruteForce, IsolatedNodeOfK8) {
  const auto inst = corrupt(Graph::complete(8), 1.0 / 8.0, AdversaryKind::isolate(), 1);
  const Node victim = inst.corrupted_set.members()[0];
  const auto candidates = brute_force_candidates(inst.corrupted, 1.0 / 8.0, kDefaultCDelta);
  bool found = false;
  for (const auto& c : candidates)
    if (c.removed == NodeSet(8, {victim})) {
      found = true;
      EXPECT_TRUE(c.accepted);
      EXPECT_DOUBLE_EQ(c.d_hat, 48.0 / 7.0);
    }
  EXPECT_TRUE(found);
  const auto r = brute_force_estimate(inst.corrupted, 1.0 / 8.0, kDefaultCDelta);
  EXPECT_LE(std::abs(r.d_hat - 7.0), 1.0);
}

TEST(BruteForce, EmptyGraph) {
  EXPECT_EQ(brute_force_estimate(Graph::empty(9), 0.2, kDefaultCDelta).d_hat, 0.0);
}

TEST(BruteForce, Errors) {
  EXPECT_THROW(brute_force_estimate(Graph::empty(15), 0.1, 4.0), std::invalid_argument);
  // Every candidate of K5 keeps a complete graph with positive goodness.
  EXPECT_THROW(brute_force_estimate(Graph::complete(5), 0.2, 0.0), NoFeasibleCandidate);
}

TEST(BruteForce, CandidateCountAndBudget) {
  const Graph g = sample_er(10, 4, 2);
  const auto c = brute_force_candidates(g, 0.2, 4.0);
  EXPECT_EQ(c.size(), 1u + 10u + 45u);
  for (const auto& x : c) EXPECT_LE(x.removed.size(), 2u);
}

TEST(Prune, ZeroEtaMatchesNaive) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = sample_er(500, 6, seed);
    PruneConfig cfg;
    cfg.eta = 0.0;
    const auto r = prune_estimate(g, cfg);
    EXPECT_EQ(r.d_hat, naive_mean(g).d_hat);
    EXPECT_TRUE(r.pruned.empty());
    ASSERT_TRUE(r.certificate.has_value());
  }
}

TEST(Prune, CleanGraphCertifiedAtRoundZero) {
  int first_round = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Graph g = sample_er(2000, 5, derive_seed(1, seed));
    PruneConfig cfg;
    cfg.eta = 0.1;
    const auto r = prune_estimate(g, cfg);
    if (r.pruned.empty() && r.certificate && r.certificate->satisfied) {
      ++first_round;
      EXPECT_EQ(r.d_hat, average_degree(g));
    }
  }
  EXPECT_GE(first_round, 95);
}

TEST(Prune, IsolateAdversaryErrorShape) {
  // |d_hat - 5| <= 5 (0.1 sqrt(log 10) sqrt(5) + 0.1 log 10) in >= 90% of 100 seeds.
  const double bound = 5 * (0.1 * std::sqrt(std::log(10.0)) * std::sqrt(5.0) + 0.1 * std::log(10.0));
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = make_instance(2000, 5, 0.1, AdversaryKind::isolate(), seed);
    PruneConfig cfg;
    cfg.eta = 0.1;
    ok += std::abs(prune_estimate(inst.corrupted, cfg).d_hat - 5.0) <= bound;
  }
  EXPECT_GE(ok, 90);
}

TEST(Prune, RemovesPlantedCliqueNodes) {
  const auto inst = make_instance(1000, 5, 0.05, AdversaryKind::clique_plant(), 4);
  PruneConfig cfg;
  cfg.eta = 0.05;
  const auto r = prune_estimate(inst.corrupted, cfg);
  EXPECT_LE(std::abs(r.d_hat - 5.0), 1.0);
  std::size_t hit = 0;
  for (Node v : r.pruned) hit += inst.corrupted_set.contains(v);
  EXPECT_GE(hit, inst.corrupted_set.size() - 1);
}

TEST(Prune, MatchesReferenceLoop) {
  const std::vector<AdversaryKind> kinds = {AdversaryKind::isolate(), AdversaryKind::clique_plant(),
                                            AdversaryKind::degree_spoof(20),
                                            AdversaryKind::cut_heavy()};
  for (std::uint64_t seed = 0; seed < 8; ++seed)
    for (const auto& kind : kinds) {
      const double eta = seed % 2 ? 0.1 : 0.2;
      const auto inst = make_instance(300, 4, eta, kind, seed);
      PruneConfig cfg;
      cfg.eta = eta;
      cfg.spectral_tol = 1e-10;
      const auto got = prune_estimate(inst.corrupted, cfg);
      const auto want = reference_prune(inst.corrupted, eta, cfg.c_delta);
      EXPECT_DOUBLE_EQ(got.d_hat, want.d_hat) << to_string(kind) << " seed " << seed;
      EXPECT_EQ(got.pruned, want.pruned) << to_string(kind) << " seed " << seed;
    }
}

TEST(Prune, ExhaustedBudgetPicksSmallestSlack) {
  const auto inst = make_instance(300, 5, 0.1, AdversaryKind::clique_plant(), 2);
  PruneConfig cfg;
  cfg.eta = 0.1;
  cfg.c_delta = 1e-3;
  cfg.spectral_tol = 1e-10;
  const auto got = prune_estimate(inst.corrupted, cfg);
  EXPECT_EQ(got.diagnostics.at("exhausted"), 1.0);
  ASSERT_TRUE(got.certificate.has_value());
  EXPECT_FALSE(got.certificate->satisfied);
  const auto want = reference_prune(inst.corrupted, 0.1, 1e-3);
  EXPECT_DOUBLE_EQ(got.d_hat, want.d_hat);
  EXPECT_NEAR(got.diagnostics.at("slack"), want.certificate->slack(),
              1e-6 * want.certificate->slack());
  EXPECT_LE(got.pruned.size(), 30u);
}

TEST(Prune, BudgetAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = make_instance(400, 6, 0.15, AdversaryKind::degree_spoof(30), seed);
    PruneConfig cfg;
    cfg.eta = 0.15;
    const auto a = prune_estimate(inst.corrupted, cfg);
    const auto b = prune_estimate(inst.corrupted, cfg);
    EXPECT_EQ(a.d_hat, b.d_hat);
    EXPECT_EQ(a.pruned, b.pruned);
    EXPECT_LE(a.pruned.size(), fraction_budget(0.15, 400));
    EXPECT_GE(a.d_hat, 0.0);
  }
}

TEST(Prune, BatchRemoval) {
  const auto inst = make_instance(600, 5, 0.1, AdversaryKind::clique_plant(), 3);
  PruneConfig cfg;
  cfg.eta = 0.1;
  cfg.removal_batch = 7;
  const auto r = prune_estimate(inst.corrupted, cfg);
  EXPECT_LE(r.pruned.size(), 60u);
  EXPECT_TRUE(r.pruned.size() % 7 == 0 || r.pruned.size() == 60u);
  EXPECT_EQ(PruneConfig{}.batch_for(5000), 1u);
  EXPECT_EQ(PruneConfig{}.batch_for(5001), 6u);
}

TEST(Prune, MaxRounds) {
  const auto inst = make_instance(300, 5, 0.1, AdversaryKind::clique_plant(), 3);
  PruneConfig cfg;
  cfg.eta = 0.1;
  cfg.max_rounds = 3;
  const auto r = prune_estimate(inst.corrupted, cfg);
  EXPECT_LE(r.diagnostics.at("rounds"), 3.0);
  EXPECT_LE(r.pruned.size(), 2u);
}

TEST(Prune, EdgelessGraph) {
  PruneConfig cfg;
  cfg.eta = 0.2;
  const auto r = prune_estimate(Graph::empty(50), cfg);
  EXPECT_EQ(r.d_hat, 0.0);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_TRUE(r.certificate->satisfied);
}

TEST(Prune, Preconditions) {
  PruneConfig cfg;
  EXPECT_THROW(prune_estimate(Graph::empty(1), cfg), std::invalid_argument);
  cfg.eta = 0.5;
  EXPECT_THROW(prune_estimate(Graph::complete(5), cfg), std::invalid_argument);
  cfg.eta = 0.1;
  cfg.c_delta = 0.0;
  EXPECT_THROW(prune_estimate(Graph::complete(5), cfg), std::invalid_argument);
}

TEST(Prune, WithinIdentifiabilityGapOfOracle) {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 10 + seed % 5;
    const double eta = 0.2;
    const auto inst = make_instance(n, 4, eta, AdversaryKind::clique_plant(), seed);
    const auto candidates = brute_force_candidates(inst.corrupted, eta, kDefaultCDelta);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, thr = 0.0;
    for (const auto& c : candidates)
      if (c.accepted) {
        lo = std::min(lo, c.d_hat);
        hi = std::max(hi, c.d_hat);
        thr = std::max(thr, c.threshold);
      }
    if (lo > hi) continue;
    PruneConfig cfg;
    cfg.eta = eta;
    const auto r = prune_estimate(inst.corrupted, cfg);
    if (r.certificate) thr = std::max(thr, r.certificate->delta_threshold);
    const double s = identifiability_gap(thr, eta, n);
    EXPECT_GE(r.d_hat, lo - s);
    EXPECT_LE(r.d_hat, hi + s);
    ++compared;
  }
  EXPECT_GT(compared, 10);
}
