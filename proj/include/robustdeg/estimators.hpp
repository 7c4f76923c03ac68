#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustdeg/adversary.hpp"
#include "robustdeg/certificates.hpp"
#include "robustdeg/graph.hpp"

namespace robustdeg {

struct EstimateResult {
  std::string estimator;
  double d_hat = 0.0;
  NodeSet pruned;
  std::optional<GoodnessReport> certificate;
  std::map<std::string, double> diagnostics;
};

/// Raised by brute_force_estimate when no candidate repair passes the threshold.
class NoFeasibleCandidate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Median of a sequence; even lengths average the two central order statistics.
template <typename T>
double median_of(std::vector<T> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = static_cast<double>(values[mid]);
  if (values.size() % 2 == 1) return upper;
  const double lower = static_cast<double>(
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
  return 0.5 * (lower + upper);
}

inline EstimateResult naive_mean(const Graph& a) {
  EstimateResult r;
  r.estimator = "naive";
  r.d_hat = average_degree(a);
  r.pruned = NodeSet(a.size());
  return r;
}

inline EstimateResult median_degree(const Graph& a) {
  EstimateResult r;
  r.estimator = "median";
  r.d_hat = a.size() ? median_of(degrees(a)) : 0.0;
  r.pruned = NodeSet(a.size());
  return r;
}

/// Sample median of (possibly corrupted) binomial counts.
inline double binomial_median(std::span<const std::int64_t> samples) {
  if (samples.empty()) throw std::invalid_argument("binomial_median: empty input");
  return median_of(std::vector<std::int64_t>(samples.begin(), samples.end()));
}

/// Average degree of the fractional repair that keeps A on kept x kept and
/// fills every pair touching a removed node with the rate d/n, solved
/// self-consistently: d n = 2 e(K) + (n^2 - |K|^2) d / n.
inline double repaired_average_degree(std::size_t n, std::size_t kept, std::size_t kept_edges) {
  if (kept == 0) return 0.0;
  const double k = static_cast<double>(kept);
  return 2.0 * static_cast<double>(kept_edges) * static_cast<double>(n) / (k * k);
}

/// Budget fraction used when certifying a kept set of size `kept`: the 2 eta n
/// node budget of the comparison argument, expressed at the kept scale.
inline double kept_scale_gamma(double eta, std::size_t n, std::size_t kept) {
  if (kept == 0) return 0.0;
  return std::min(1.0, 2.0 * eta * static_cast<double>(n) / static_cast<double>(kept));
}

struct BruteForceCandidate {
  NodeSet removed;
  double d_hat = 0.0;
  double goodness = 0.0;
  double threshold = 0.0;
  bool accepted = false;

  double slack() const noexcept {
    if (threshold > 0.0) return goodness / threshold;
    return goodness > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
};

/// Every candidate corrupted set z with |z| <= floor(eta n), scored by the
/// exhaustive goodness of the kept subgraph at its own scale.
inline std::vector<BruteForceCandidate> brute_force_candidates(const Graph& a, double eta,
                                                               double c_delta) {
  const std::size_t n = a.size();
  if (n > 14) throw std::invalid_argument("brute_force_estimate: n > 14");
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("brute_force_estimate: eta must be in [0, 1)");
  const std::size_t budget = fraction_budget(eta, n);
  std::vector<BruteForceCandidate> out;
  const std::uint32_t limit = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > budget) continue;
    std::vector<Node> removed, kept;
    for (Node v = 0; v < n; ++v) ((mask >> v) & 1U ? removed : kept).push_back(v);
    if (kept.empty()) continue;
    const NodeSet keep(n, kept);
    const Graph sub = induced_subgraph(a, keep);
    const double gamma = kept_scale_gamma(eta, n, kept.size());
    BruteForceCandidate c;
    c.removed = NodeSet(n, std::move(removed));
    c.d_hat = repaired_average_degree(n, kept.size(), sub.edge_count());
    c.goodness = goodness_exact(sub, gamma);
    c.threshold = delta_threshold(c_delta, gamma, average_degree(sub),
                                  fraction_budget(gamma, sub.size()));
    c.accepted = c.goodness <= c.threshold;
    out.push_back(std::move(c));
  }
  return out;
}

/// Width s = 2 threshold / ((1 - 2 eta)^2 n) of the band around the accepted
/// candidates' estimates in which any certified estimate must fall.
inline double identifiability_gap(double threshold, double eta, std::size_t n) {
  const double q = 1.0 - 2.0 * eta;
  return 2.0 * threshold / (q * q * static_cast<double>(n));
}

/// Exhaustive identifiability oracle for n <= 14: returns the accepted
/// candidate with the smallest goodness / threshold ratio (ties: first in
/// mask order).
inline EstimateResult brute_force_estimate(const Graph& a, double eta, double c_delta) {
  const auto candidates = brute_force_candidates(a, eta, c_delta);
  const BruteForceCandidate* best = nullptr;
  std::size_t accepted = 0;
  for (const auto& c : candidates) {
    if (!c.accepted) continue;
    ++accepted;
    if (!best || c.slack() < best->slack()) best = &c;
  }
  if (!best) throw NoFeasibleCandidate("no feasible candidate");
  EstimateResult r;
  r.estimator = "brute";
  r.d_hat = best->d_hat;
  r.pruned = best->removed;
  r.diagnostics["slack"] = best->slack();
  r.diagnostics["candidates"] = static_cast<double>(candidates.size());
  r.diagnostics["accepted"] = static_cast<double>(accepted);
  return r;
}

struct PruneConfig {
  double eta = 0.1;
  double c_delta = kDefaultCDelta;
  /// 0 means no limit beyond the removal budget.
  std::size_t max_rounds = 0;
  /// 0 selects 1 for n <= 5000 and ceil(n / 1000) above.
  std::size_t removal_batch = 0;
  /// Relative accuracy of the spectral norm inside the certificate.
  double spectral_tol = 1e-6;

  void validate() const {
    if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("PruneConfig: eta must be in [0, 1/2)");
    if (!(c_delta > 0.0)) throw std::invalid_argument("PruneConfig: c_delta must be > 0");
    if (!(spectral_tol > 0.0)) throw std::invalid_argument("PruneConfig: spectral_tol must be > 0");
  }

  std::size_t batch_for(std::size_t n) const {
    if (removal_batch > 0) return removal_batch;
    return n <= 5000 ? 1 : (n + 999) / 1000;
  }
};

namespace detail {

inline GoodnessReport trivial_report(double gamma) {
  GoodnessReport r;
  r.gamma = gamma;
  r.satisfied = true;
  return r;
}

/// Working state of the pruning loop: the kept set and degrees inside it.
class KeptGraph {
 public:
  explicit KeptGraph(const Graph& g)
      : g_(&g), alive_(g.size(), 1), degree_(degrees(g)), edges_(g.edge_count()), size_(g.size()) {}

  std::size_t size() const noexcept { return size_; }
  std::size_t edges() const noexcept { return edges_; }
  double average() const noexcept {
    return size_ ? 2.0 * static_cast<double>(edges_) / static_cast<double>(size_) : 0.0;
  }

  std::vector<Node> kept() const {
    std::vector<Node> k;
    k.reserve(size_);
    for (Node v = 0; v < alive_.size(); ++v)
      if (alive_[v]) k.push_back(v);
    return k;
  }

  std::vector<std::size_t> kept_degrees() const {
    std::vector<std::size_t> d;
    d.reserve(size_);
    for (Node v = 0; v < alive_.size(); ++v)
      if (alive_[v]) d.push_back(degree_[v]);
    return d;
  }

  /// The `count` kept nodes with the largest |d_v - average|; ties go to the
  /// lowest index.
  std::vector<Node> most_deviant(std::size_t count) const {
    const double avg = average();
    std::vector<Node> k = kept();
    count = std::min(count, k.size());
    std::partial_sort(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(count), k.end(),
                      [&](Node a, Node b) {
                        const double da = std::abs(static_cast<double>(degree_[a]) - avg);
                        const double db = std::abs(static_cast<double>(degree_[b]) - avg);
                        return da != db ? da > db : a < b;
                      });
    k.resize(count);
    return k;
  }

  void remove(Node v) {
    alive_[v] = 0;
    --size_;
    edges_ -= degree_[v];
    for (Node u : g_->neighbors(v))
      if (alive_[u]) --degree_[u];
    degree_[v] = 0;
  }

 private:
  const Graph* g_;
  std::vector<char> alive_;
  std::vector<std::size_t> degree_;
  std::size_t edges_;
  std::size_t size_;
};

struct PruneRound {
  std::size_t removed = 0;   // prefix length of the removal order
  double d_fill = 0.0;
  double slack_lower = 0.0;  // exact when `report` is set
  std::optional<GoodnessReport> report;
};

}  // namespace detail

/// Certificate-guided pruning.
///
/// Keeps a node set K (initially everything). Each round estimates
/// d_K = 2 e(K) n / |K|^2 and certifies G[K] at budget gamma = 2 eta n / |K|.
/// A satisfied certificate ends the search; otherwise the nodes whose degree
/// inside K deviates most from d(G[K]) are removed. At most floor(eta n) nodes
/// are removed. If no round is certified the round with the smallest
/// combined / threshold^2 ratio is returned with diagnostics["exhausted"] = 1.
///
/// The spectral norm is skipped in rounds whose degree term alone, or a
/// Rayleigh-quotient lower bound from the previous Ritz vector, already
/// violates the threshold; such rounds record a lower bound on their slack.
inline EstimateResult prune_estimate(const Graph& a, const PruneConfig& cfg) {
  cfg.validate();
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("prune_estimate: need n >= 2");

  EstimateResult result;
  result.estimator = "prune";
  CertificateOptions copts;
  copts.tol = cfg.spectral_tol;

  if (cfg.eta == 0.0) {
    result.d_hat = average_degree(a);
    result.pruned = NodeSet(n);
    const double gamma = 1.0 / static_cast<double>(n);
    result.certificate = a.edge_count() ? goodness_certificate(a, gamma, cfg.c_delta, copts)
                                        : detail::trivial_report(gamma);
    result.diagnostics["rounds"] = 1;
    result.diagnostics["slack"] = result.certificate->slack();
    result.diagnostics["kept_edges"] = static_cast<double>(a.edge_count());
    result.diagnostics["exhausted"] = 0;
    return result;
  }

  const std::size_t budget = fraction_budget(cfg.eta, n);
  const std::size_t batch = cfg.batch_for(n);
  const std::size_t round_cap = cfg.max_rounds ? cfg.max_rounds : std::numeric_limits<std::size_t>::max();

  detail::KeptGraph kept(a);
  std::vector<Node> removal_order;
  std::vector<detail::PruneRound> rounds;
  std::vector<double> ritz(n, 0.0);  // previous Ritz vector, indexed by original node
  bool have_ritz = false;
  std::size_t spectral_evaluations = 0;

  auto certify_exact = [&](const std::vector<Node>& keep_list, const detail::DegreeTerms& terms,
                           bool update_ritz) {
    const Graph sub = induced_subgraph(a, NodeSet(n, keep_list));
    std::vector<double> warm;
    if (have_ritz) {
      warm.resize(keep_list.size());
      for (std::size_t i = 0; i < keep_list.size(); ++i) warm[i] = ritz[keep_list[i]];
    }
    LanczosOptions lopts;
    lopts.tol = cfg.spectral_tol;
    lopts.start = warm;
    NormEstimate est = rescaled_spectral(sub, terms.average, lopts);
    ++spectral_evaluations;
    if (update_ritz && est.vector.size() == keep_list.size()) {
      std::fill(ritz.begin(), ritz.end(), 0.0);
      for (std::size_t i = 0; i < keep_list.size(); ++i) ritz[keep_list[i]] = est.vector[i];
      have_ritz = true;
    }
    return detail::assemble(terms, est.norm);
  };

  auto finish = [&](const detail::PruneRound& round, bool exhausted) {
    result.d_hat = round.d_fill;
    result.pruned = NodeSet(n, std::vector<Node>(removal_order.begin(),
                                                 removal_order.begin() +
                                                     static_cast<std::ptrdiff_t>(round.removed)));
    result.certificate = round.report;
    result.diagnostics["rounds"] = static_cast<double>(rounds.size());
    result.diagnostics["slack"] = round.report ? round.report->slack() : round.slack_lower;
    result.diagnostics["exhausted"] = exhausted ? 1.0 : 0.0;
    result.diagnostics["spectral_evaluations"] = static_cast<double>(spectral_evaluations);
    result.diagnostics["selected_removed"] = static_cast<double>(round.removed);
    return result;
  };

  for (;;) {
    detail::PruneRound round;
    round.removed = removal_order.size();
    round.d_fill = repaired_average_degree(n, kept.size(), kept.edges());
    const double gamma = kept_scale_gamma(cfg.eta, n, kept.size());
    if (kept.edges() == 0) {
      round.report = detail::trivial_report(gamma);
      rounds.push_back(round);
      result.diagnostics["kept_edges"] = 0;
      return finish(rounds.back(), false);
    }
    const auto terms = detail::degree_terms(kept.kept_degrees(), gamma, cfg.c_delta);
    const double threshold_sq = terms.threshold * terms.threshold;
    const double p1_part = 8.0 * terms.p1 * terms.p1;
    auto ratio = [&](double combined) {
      if (threshold_sq > 0.0) return combined / threshold_sq;
      return combined > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };

    bool decided = false;
    if (p1_part > threshold_sq) {
      round.slack_lower = ratio(p1_part);
      decided = true;
    } else if (have_ritz) {
      // |y^T M y| / |y|^2 <= ||M|| for any y.
      const auto keep_list = kept.kept();
      const Graph sub = induced_subgraph(a, NodeSet(n, keep_list));
      ScaledCenteredAdjacency op(sub, inverse_sqrt_rescaling(sub, terms.average),
                                 terms.average / static_cast<double>(sub.size()), 0.0);
      std::vector<double> y(keep_list.size()), my(keep_list.size());
      double yy = 0.0;
      for (std::size_t i = 0; i < keep_list.size(); ++i) {
        y[i] = ritz[keep_list[i]];
        yy += y[i] * y[i];
      }
      if (yy > 0.0) {
        op(y, my);
        double ymy = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) ymy += y[i] * my[i];
        const double p2_lower = std::abs(ymy) / yy * terms.w_norm;
        const double combined_lower = p1_part + 2.0 * p2_lower * p2_lower;
        if (combined_lower > threshold_sq) {
          round.slack_lower = ratio(combined_lower);
          decided = true;
        }
      }
    }
    if (!decided) {
      round.report = certify_exact(kept.kept(), terms, true);
      round.slack_lower = round.report->slack();
      if (round.report->satisfied) {
        rounds.push_back(round);
        result.diagnostics["kept_edges"] = static_cast<double>(kept.edges());
        return finish(rounds.back(), false);
      }
    }
    rounds.push_back(round);

    if (rounds.size() >= round_cap || removal_order.size() >= budget) break;
    const std::size_t take = std::min(batch, budget - removal_order.size());
    for (Node v : kept.most_deviant(take)) {
      kept.remove(v);
      removal_order.push_back(v);
    }
  }

  // No certified round: pick the smallest exact slack, computing exact
  // certificates only for rounds whose lower bound could still win.
  std::vector<std::size_t> order(rounds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return rounds[x].slack_lower < rounds[y].slack_lower;
  });
  std::size_t best = order.front();
  double best_slack = std::numeric_limits<double>::infinity();
  for (std::size_t idx : order) {
    auto& round = rounds[idx];
    if (round.slack_lower >= best_slack) break;
    if (!round.report) {
      std::vector<char> removed_mask(n, 0);
      for (std::size_t i = 0; i < round.removed; ++i) removed_mask[removal_order[i]] = 1;
      std::vector<Node> keep_list;
      for (Node v = 0; v < n; ++v)
        if (!removed_mask[v]) keep_list.push_back(v);
      const Graph sub = induced_subgraph(a, NodeSet(n, keep_list));
      const double gamma = kept_scale_gamma(cfg.eta, n, keep_list.size());
      const auto terms = detail::degree_terms(degrees(sub), gamma, cfg.c_delta);
      round.report = certify_exact(keep_list, terms, false);
      round.slack_lower = round.report->slack();
    }
    if (round.slack_lower < best_slack) {
      best_slack = round.slack_lower;
      best = idx;
    }
  }
  {
    std::vector<char> removed_mask(n, 0);
    for (std::size_t i = 0; i < rounds[best].removed; ++i) removed_mask[removal_order[i]] = 1;
    std::size_t kept_edges = 0;
    for (Node v = 0; v < n; ++v)
      if (!removed_mask[v])
        for (Node u : a.neighbors(v))
          if (u > v && !removed_mask[u]) ++kept_edges;
    result.diagnostics["kept_edges"] = static_cast<double>(kept_edges);
  }
  return finish(rounds[best], true);
}

}  // namespace robustdeg
