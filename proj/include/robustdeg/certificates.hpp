#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "robustdeg/adversary.hpp"
#include "robustdeg/graph.hpp"
#include "robustdeg/lanczos.hpp"

namespace robustdeg {

/// Default constant in front of the delta threshold. Calibrated on clean
/// G(2000, d0/n) graphs (see tools/calibrate.cpp).
inline constexpr double kDefaultCDelta = 4.0;

/// Largest |sum_{i in S} a_i| over subsets with |S| <= k.
///
/// The maximum is attained either by the k largest positive entries or by the
/// k most negative ones, so it is computed by partial sorting. The same value
/// bounds |sum_i a_i x_i| over the fractional box 0 <= x_i <= 1, sum x_i <= k.
inline double subset_sum_bound(std::span<const double> a, std::int64_t k) {
  if (k < 0 || static_cast<std::size_t>(k) > a.size())
    throw std::invalid_argument("subset_sum_bound: k must be in [0, n]");
  if (k == 0) return 0.0;
  std::vector<double> pos, neg;
  for (double x : a) {
    if (x > 0.0) pos.push_back(x);
    else if (x < 0.0) neg.push_back(-x);
  }
  auto top_sum = [k](std::vector<double>& v) {
    const auto take = std::min(v.size(), static_cast<std::size_t>(k));
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(take), v.end(),
                      std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < take; ++i) s += v[i];
    return s;
  };
  return std::max(top_sum(pos), top_sum(neg));
}

/// Exhaustive goodness: max over 1 <= |S| <= floor(gamma n) of
/// |e(S) + e(S, S^c) - (d(G)/n) N(S)|. Only for n <= 20.
inline double goodness_exact(const Graph& g, double gamma) {
  const std::size_t n = g.size();
  if (n > 20) throw std::invalid_argument("goodness_exact: n > 20, use goodness_certificate");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("goodness_exact: gamma must be in [0, 1]");
  const std::size_t k = fraction_budget(gamma, n);
  if (k == 0 || n == 0) return 0.0;
  std::vector<std::uint32_t> rows(n, 0);
  for (Node v = 0; v < n; ++v)
    for (Node u : g.neighbors(v)) rows[v] |= std::uint32_t{1} << u;
  const double density = average_degree(g) / static_cast<double>(n);
  std::vector<double> expected(k + 1);
  for (std::size_t s = 0; s <= k; ++s)
    expected[s] = density * static_cast<double>(max_possible_incident(n, s));

  // Gray-code walk: each step toggles one node, so the degree sum and e(S)
  // are updated in O(1).
  double best = 0.0;
  std::uint32_t mask = 0;
  std::int64_t degree_sum = 0, inside = 0;
  std::size_t size = 0;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < limit; ++step) {
    const int v = std::countr_zero(step);
    const std::uint32_t bit = std::uint32_t{1} << v;
    const auto links = static_cast<std::int64_t>(std::popcount(rows[v] & mask));
    const auto deg = static_cast<std::int64_t>(std::popcount(rows[v]));
    if (mask & bit) {
      mask &= ~bit;
      degree_sum -= deg;
      inside -= links;
      --size;
    } else {
      mask |= bit;
      degree_sum += deg;
      inside += links;
      ++size;
    }
    if (size > k) continue;
    // e(S) + e(S, S^c) = sum_{v in S} d_v - e(S)
    const double incident = static_cast<double>(degree_sum - inside);
    best = std::max(best, std::abs(incident - expected[size]));
  }
  return best;
}

/// Spectral norm of D^{-1/2} (A - (d(A)/n) 11^T) D^{-1/2}, D_vv = max(1, d_v / (2 d_ref)).
inline NormEstimate rescaled_spectral(const Graph& g, double d_ref, const LanczosOptions& opts) {
  if (!(d_ref > 0.0)) throw std::invalid_argument("rescaled_spectral_norm: d_ref must be > 0");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("rescaled_spectral_norm: tol must be > 0");
  if (g.edge_count() == 0) {
    NormEstimate zero;
    zero.vector.assign(g.size(), 0.0);
    return zero;
  }
  ScaledCenteredAdjacency op(g, inverse_sqrt_rescaling(g, d_ref),
                             average_degree(g) / static_cast<double>(g.size()), 0.0);
  return operator_norm(g.size(), op.as_function(), opts);
}

inline double rescaled_spectral_norm(const Graph& g, double d_ref, double tol = 1e-10) {
  LanczosOptions opts;
  opts.tol = tol;
  return rescaled_spectral(g, d_ref, opts).norm;
}

/// c * (sqrt(log(e/gamma)) sqrt(d) + log(e/gamma)) * k, the delta(G) * (gamma n) scale.
inline double delta_threshold(double c_delta, double gamma, double d, std::size_t k) {
  if (k == 0) return 0.0;
  const double log_term = std::log(std::numbers::e / gamma);
  return c_delta * (std::sqrt(log_term) * std::sqrt(std::max(d, 0.0)) + log_term) *
         static_cast<double>(k);
}

struct GoodnessReport {
  double gamma = 0.0;
  double p1_bound = 0.0;
  double spectral_norm = 0.0;
  double w_norm_bound = 0.0;
  double p2_bound = 0.0;
  double combined_sq_bound = 0.0;
  double delta_threshold = 0.0;
  bool satisfied = false;

  /// combined_sq_bound / delta_threshold^2; 0 when both vanish, +inf when only
  /// the threshold does.
  double slack() const noexcept {
    const double t2 = delta_threshold * delta_threshold;
    if (t2 > 0.0) return combined_sq_bound / t2;
    return combined_sq_bound > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
};

struct CertificateOptions {
  double tol = 1e-8;
  std::size_t max_iterations = 0;
  std::span<const double> warm_start = {};
};

namespace detail {

/// The degree-only part of the certificate: everything except the spectral norm.
struct DegreeTerms {
  double gamma = 0.0;
  double average = 0.0;
  std::size_t k = 0;
  double p1 = 0.0;
  double w_norm = 0.0;
  double threshold = 0.0;
};

template <typename Degrees>
DegreeTerms degree_terms(const Degrees& deg, double gamma, double c_delta) {
  DegreeTerms t;
  const std::size_t n = deg.size();
  double total = 0.0;
  for (auto dv : deg) total += static_cast<double>(dv);
  t.gamma = gamma;
  t.average = n ? total / static_cast<double>(n) : 0.0;
  t.k = fraction_budget(gamma, n);
  std::vector<double> dev(n);
  for (std::size_t v = 0; v < n; ++v) dev[v] = static_cast<double>(deg[v]) - t.average;
  t.p1 = subset_sum_bound(dev, static_cast<std::int64_t>(t.k));
  // ||D^{1/2} w||^2 <= (3/2) sum w + (1/(2d)) sum w (d_v - d)
  t.w_norm = 1.5 * static_cast<double>(t.k) + t.p1 / (2.0 * t.average);
  t.threshold = delta_threshold(c_delta, gamma, t.average, t.k);
  return t;
}

inline GoodnessReport assemble(const DegreeTerms& t, double spectral_norm) {
  GoodnessReport r;
  r.gamma = t.gamma;
  r.p1_bound = t.p1;
  r.spectral_norm = spectral_norm;
  r.w_norm_bound = t.w_norm;
  r.p2_bound = spectral_norm * t.w_norm;
  // (2x - y)^2 <= 8 x^2 + 2 y^2
  r.combined_sq_bound = 8.0 * r.p1_bound * r.p1_bound + 2.0 * r.p2_bound * r.p2_bound;
  r.delta_threshold = t.threshold;
  r.satisfied = r.combined_sq_bound <= r.delta_threshold * r.delta_threshold;
  return r;
}

inline void check_certificate_args(const Graph& g, double gamma, double c_delta) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("goodness_certificate: gamma must be in (0, 1]");
  if (!(c_delta >= 0.0)) throw std::invalid_argument("goodness_certificate: c_delta must be >= 0");
  if (!(average_degree(g) > 0.0))
    throw std::invalid_argument("goodness_certificate: graph has zero average degree");
}

}  // namespace detail

/// Polynomial-time upper bound on the goodness quantity at set-size budget
/// floor(gamma n):
///   p1 = max_{|S|<=k} |sum_{v in S} (d_v - d)|          (degree deviations)
///   p2 = ||D^{-1/2}(A - d/n 11^T)D^{-1/2}|| * w_norm     (rescaled quadratic form)
///   combined = 8 p1^2 + 2 p2^2 >= <A - d/n 11^T, 2 w 1^T - w w^T>^2
/// and satisfied iff combined <= delta_threshold^2.
inline GoodnessReport goodness_certificate(const Graph& g, double gamma, double c_delta,
                                           const CertificateOptions& opts = {},
                                           NormEstimate* spectral_out = nullptr) {
  detail::check_certificate_args(g, gamma, c_delta);
  const auto terms = detail::degree_terms(degrees(g), gamma, c_delta);
  LanczosOptions lopts;
  lopts.tol = opts.tol;
  lopts.max_iterations = opts.max_iterations;
  lopts.start = opts.warm_start;
  NormEstimate spectral = rescaled_spectral(g, terms.average, lopts);
  auto report = detail::assemble(terms, spectral.norm);
  if (spectral_out) *spectral_out = std::move(spectral);
  return report;
}

/// <A - (d(A)/n) 11^T, 2 w 1^T - w w^T> for w the indicator of S, via
/// 2 (sum_{v in S} d_v - |S| d) - (2 e(S) - d |S|^2 / n).
inline double certificate_inner_product(const Graph& g, const NodeSet& s) {
  if (s.empty() || g.size() == 0) return 0.0;
  const double d = average_degree(g);
  const double size = static_cast<double>(s.size());
  double degree_sum = 0.0;
  for (Node v : s) degree_sum += static_cast<double>(g.degree(v));
  const double inside = static_cast<double>(edge_count_within(g, s));
  return 2.0 * (degree_sum - size * d) -
         (2.0 * inside - d * size * size / static_cast<double>(g.size()));
}

}  // namespace robustdeg
