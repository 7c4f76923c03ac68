#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustdeg/graph.hpp"
#include "robustdeg/lanczos.hpp"
#include "robustdeg/parallel.hpp"
#include "robustdeg/rng.hpp"
#include "robustdeg/sampling.hpp"

namespace robustdeg {

/// Default constants per lemma, frozen from tools/calibrate.cpp runs.
inline constexpr double kAverageDegreeC = 3.0;
inline constexpr double kSubsetSumC = 4.0;
inline constexpr double kHighDegreeC = 8.0;
inline constexpr double kSpectralC = 10.0;

struct VerificationReport {
  std::string lemma_id;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  /// Largest observed / claimed ratio over trials; > 1 marks a violation.
  double empirical_max_ratio = 0.0;
  std::map<std::string, double> params;
};

namespace detail {

inline double safe_ratio(double observed, double bound) {
  if (bound > 0.0) return observed / bound;
  return observed > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

struct TrialOutcome {
  double ratio = 0.0;
  /// Optional side quantity; the report keeps its maximum.
  double extra = 0.0;
};

/// Runs `trial(seed_t)` for every trial on up to `jobs` workers, seed_t =
/// derive_seed(seed, t), and folds the outcomes into a report.
template <typename Trial>
VerificationReport run_trials(std::string lemma_id, std::int64_t trials, std::uint64_t seed,
                              std::size_t jobs, Trial&& trial, double* extra_max = nullptr) {
  if (trials < 1) throw std::invalid_argument(lemma_id + ": trials must be >= 1");
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_for(outcomes.size(), jobs,
               [&](std::size_t t) { outcomes[t] = trial(derive_seed(seed, t)); });
  VerificationReport r;
  r.lemma_id = std::move(lemma_id);
  r.trials = trials;
  double extra = 0.0;
  for (const auto& o : outcomes) {
    if (o.ratio > 1.0) ++r.violations;
    r.empirical_max_ratio = std::max(r.empirical_max_ratio, o.ratio);
    extra = std::max(extra, o.extra);
  }
  if (extra_max) *extra_max = extra;
  return r;
}

inline double expected_degree(std::size_t n, double d0) {
  return (1.0 - 1.0 / static_cast<double>(n)) * d0;
}

}  // namespace detail

/// |d(A) - (1 - 1/n) d0| <= C' max(log n / n, sqrt(log n / n) sqrt(d0)).
inline VerificationReport verify_average_degree(std::size_t n, double d0, std::int64_t trials,
                                                double c, std::uint64_t seed,
                                                std::size_t jobs = 1) {
  if (n == 0) throw std::invalid_argument("average_degree: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double rate = std::log(nn) / nn;
  const double bound = c * std::max(rate, std::sqrt(rate) * std::sqrt(d0));
  const double mean = detail::expected_degree(n, d0);
  auto r = detail::run_trials("average_degree", trials, seed, jobs, [&](std::uint64_t s) {
    const Graph g = sample_er(n, d0, s);
    return detail::TrialOutcome{detail::safe_ratio(std::abs(average_degree(g) - mean), bound)};
  });
  r.params = {{"n", nn}, {"d0", d0}, {"C", c}, {"bound", bound}};
  return r;
}

/// Largest |sum_{i in S} (d_i - E d)| over |S| = k for k = 1..n. The sum is
/// linear in S, so the extremes are prefixes of the sorted deviations.
inline std::vector<double> exact_degree_subset_sums(const Graph& g, double mean) {
  const std::size_t n = g.size();
  std::vector<double> dev(n);
  for (Node v = 0; v < n; ++v) dev[v] = static_cast<double>(g.degree(v)) - mean;
  std::sort(dev.begin(), dev.end(), std::greater<>());
  std::vector<double> best(n + 1, 0.0);
  double top = 0.0, bottom = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    top += dev[k - 1];
    bottom += dev[n - k];
    best[k] = std::max(std::abs(top), std::abs(bottom));
  }
  return best;
}

/// Degree subset sums against C' (k log(en/k) + k sqrt(d0 log(en/k))) for every
/// k. For n <= 14 every S is also checked for
/// |e(S) - E e(S)| <= C' (|S| log(en/|S|) + |S| sqrt(d0 (|S|/n) log(en/|S|))).
inline VerificationReport verify_degree_subset_sum(std::size_t n, double d0, std::int64_t trials,
                                                   double c, std::uint64_t seed,
                                                   std::size_t jobs = 1) {
  if (n == 0) throw std::invalid_argument("degree_subset_sum: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double mean = detail::expected_degree(n, d0);
  auto log_term = [nn](double k) { return std::log(std::numbers::e * nn / k); };
  std::vector<double> degree_bound(n + 1), edge_bound(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double l = log_term(kk);
    degree_bound[k] = c * (kk * l + kk * std::sqrt(d0 * l));
    edge_bound[k] = c * (kk * l + kk * std::sqrt(d0 * (kk / nn) * l));
  }
  const bool exhaustive = n <= 14;
  auto r = detail::run_trials("degree_subset_sum", trials, seed, jobs, [&](std::uint64_t s) {
    const Graph g = sample_er(n, d0, s);
    const auto sums = exact_degree_subset_sums(g, mean);
    double worst = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      worst = std::max(worst, detail::safe_ratio(sums[k], degree_bound[k]));
    if (exhaustive) {
      std::vector<std::uint32_t> rows(n, 0);
      for (Node v = 0; v < n; ++v)
        for (Node u : g.neighbors(v)) rows[v] |= std::uint32_t{1} << u;
      const double p = d0 / nn;
      for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
        std::size_t twice = 0;
        for (std::uint32_t rest = mask; rest; rest &= rest - 1)
          twice += static_cast<std::size_t>(std::popcount(rows[std::countr_zero(rest)] & mask));
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        const double expected = p * static_cast<double>(size * (size - 1) / 2);
        const double observed = std::abs(static_cast<double>(twice / 2) - expected);
        worst = std::max(worst, detail::safe_ratio(observed, edge_bound[size]));
      }
    }
    return detail::TrialOutcome{worst};
  });
  r.params = {{"n", nn}, {"d0", d0}, {"C", c}, {"exhaustive_edge_check", exhaustive ? 1.0 : 0.0}};
  return r;
}

/// #{v : d_v > 2 (1 - 1/n) d0} <= C' n / d0.
inline VerificationReport verify_high_degree_count(std::size_t n, double d0, std::int64_t trials,
                                                   double c, std::uint64_t seed,
                                                   std::size_t jobs = 1) {
  if (!(d0 > 0.0)) throw std::invalid_argument("high_degree_count: d0 must be > 0");
  const double nn = static_cast<double>(n);
  const double cutoff = 2.0 * detail::expected_degree(n, d0);
  const double bound = c * nn / d0;
  auto r = detail::run_trials("high_degree_count", trials, seed, jobs, [&](std::uint64_t s) {
    const Graph g = sample_er(n, d0, s);
    std::size_t count = 0;
    for (Node v = 0; v < n; ++v)
      if (static_cast<double>(g.degree(v)) > cutoff) ++count;
    return detail::TrialOutcome{detail::safe_ratio(static_cast<double>(count), bound)};
  });
  r.params = {{"n", nn}, {"d0", d0}, {"C", c}, {"bound", bound}};
  return r;
}

/// ||D^{-1/2} (A - E A) D^{-1/2}|| <= C' sqrt(d0) with D_vv = max(1, d_v / (2 E d))
/// and E A = (d0/n)(11^T - I). params["plain_norm_max"] is the largest
/// unrescaled ||A - E A|| seen, for contrast only.
inline VerificationReport verify_spectral(std::size_t n, double d0, std::int64_t trials, double c,
                                          std::uint64_t seed, std::size_t jobs = 1,
                                          double tol = 1e-8) {
  if (!(d0 > 0.0)) throw std::invalid_argument("spectral: d0 must be > 0");
  const double nn = static_cast<double>(n);
  const double p = d0 / nn;
  const double mean = detail::expected_degree(n, d0);
  const double bound = c * std::sqrt(d0);
  double plain_max = 0.0;
  auto r = detail::run_trials(
      "spectral", trials, seed, jobs,
      [&](std::uint64_t s) {
        const Graph g = sample_er(n, d0, s);
        LanczosOptions opts;
        opts.tol = tol;
        opts.seed = derive_seed(s, 7);
        ScaledCenteredAdjacency scaled(g, inverse_sqrt_rescaling(g, mean), p, p);
        ScaledCenteredAdjacency raw(g, std::vector<double>(n, 1.0), p, p);
        const double norm = operator_norm(n, scaled.as_function(), opts).norm;
        const double plain_norm = operator_norm(n, raw.as_function(), opts).norm;
        return detail::TrialOutcome{detail::safe_ratio(norm, bound), plain_norm};
      },
      &plain_max);
  r.params = {{"n", nn}, {"d0", d0}, {"C", c}, {"bound", bound}, {"plain_norm_max", plain_max}};
  return r;
}

namespace detail {

/// lgamma(x + 1) - (x + 1/2) log x + x - log sqrt(2 pi): the Stirling remainder.
inline double stirling_error(double x) {
  if (x == 0.0) return 0.0;
  if (x <= 15.0)
    return std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x -
           0.5 * std::log(2.0 * std::numbers::pi);
  constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680,
                   s4 = 1.0 / 1188;
  const double xx = x * x;
  if (x > 500) return (s0 - s1 / xx) / x;
  if (x > 80) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (x > 35) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

/// x log(x / m) + m - x without cancellation when x is close to m.
inline double deviance_term(double x, double m) {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

}  // namespace detail

/// log Pr(X = k) for X ~ Binomial(n, p), 0 < p < 1. Log-gamma terms are split
/// into Stirling remainders and deviance terms, so nothing large cancels even
/// at n = 1e8.
inline double binomial_log_pmf(std::uint64_t n, std::uint64_t k, double p) {
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  const double q = 1.0 - p;
  if (k == 0) return nn * std::log1p(-p);
  if (k == n) return nn * std::log(p);
  const double lc = detail::stirling_error(nn) - detail::stirling_error(kk) -
                    detail::stirling_error(nn - kk) - detail::deviance_term(kk, nn * p) -
                    detail::deviance_term(nn - kk, nn * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(kk) + std::log1p(-kk / nn);
  return lc - 0.5 * lf;
}

/// Pr(lo <= X <= hi) for X ~ Binomial(n, p), summed in log space around the
/// largest term with Neumaier compensation.
inline double binomial_window_probability(std::uint64_t n, double p, std::int64_t lo,
                                          std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(n));
  if (lo > hi) return 0.0;
  if (p <= 0.0) return lo == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return hi == static_cast<std::int64_t>(n) ? 1.0 : 0.0;
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k)
    logs.push_back(binomial_log_pmf(n, static_cast<std::uint64_t>(k), p));
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0, comp = 0.0;
  for (double l : logs) {
    const double x = std::exp(l - peak);
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return std::exp(peak) * (sum + comp);
}

/// Pr(d - 100 eta sqrt(d) <= X <= d - 1) and Pr(d + 1 <= X <= d + 100 eta sqrt(d))
/// for X ~ Binomial(n, d/n), each checked against 4 eta. The ratio reported is
/// 4 eta / probability. When 100 eta sqrt(d) < 1 both windows are empty and
/// the report has trials = 0 and params["applicable"] = 0.
inline VerificationReport verify_binomial_quantile(std::uint64_t n, std::int64_t d, double eta) {
  if (d < 1) throw std::invalid_argument("binomial_quantile: d must be >= 1");
  if (static_cast<std::uint64_t>(d) > n) throw std::invalid_argument("binomial_quantile: d > n");
  if (!(eta >= 0.0)) throw std::invalid_argument("binomial_quantile: eta must be >= 0");
  const double dd = static_cast<double>(d);
  const double half_width = 100.0 * eta * std::sqrt(dd);
  VerificationReport r;
  r.lemma_id = "binomial_quantile";
  r.params = {{"n", static_cast<double>(n)}, {"d", dd}, {"eta", eta}, {"claimed", 4.0 * eta}};
  if (half_width < 1.0) {
    r.params["applicable"] = 0.0;
    r.params["lower_probability"] = 0.0;
    r.params["upper_probability"] = 0.0;
    return r;
  }
  const double p = dd / static_cast<double>(n);
  const auto lo = static_cast<std::int64_t>(std::ceil(dd - half_width - 1e-9));
  const auto hi = static_cast<std::int64_t>(std::floor(dd + half_width + 1e-9));
  const double lower = binomial_window_probability(n, p, lo, d - 1);
  const double upper = binomial_window_probability(n, p, d + 1, hi);
  r.trials = 2;
  for (double prob : {lower, upper}) {
    const double ratio = detail::safe_ratio(4.0 * eta, prob);
    if (ratio > 1.0) ++r.violations;
    r.empirical_max_ratio = std::max(r.empirical_max_ratio, ratio);
  }
  r.params["applicable"] = 1.0;
  r.params["lower_probability"] = lower;
  r.params["upper_probability"] = upper;
  return r;
}

}  // namespace robustdeg
