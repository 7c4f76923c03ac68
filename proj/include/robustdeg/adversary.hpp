#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "robustdeg/graph.hpp"
#include "robustdeg/rng.hpp"
#include "robustdeg/sampling.hpp"

namespace robustdeg {

/// floor(fraction * n), guarded against products such as 0.29 * 100 that land
/// one ulp below an integer.
inline std::size_t fraction_budget(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  if (!(x > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(x + 1e-9));
}

struct AdversaryKind {
  enum class Tag { none, isolate, clique_plant, degree_spoof, cut_heavy, random_rewire };

  Tag tag = Tag::none;
  /// degree_spoof: target degree (>= 0). random_rewire: edge probability in [0, 1].
  double param = 0.0;

  static AdversaryKind none() { return {Tag::none, 0.0}; }
  static AdversaryKind isolate() { return {Tag::isolate, 0.0}; }
  static AdversaryKind clique_plant() { return {Tag::clique_plant, 0.0}; }
  static AdversaryKind degree_spoof(double target) { return {Tag::degree_spoof, target}; }
  static AdversaryKind cut_heavy() { return {Tag::cut_heavy, 0.0}; }
  static AdversaryKind random_rewire(double p) { return {Tag::random_rewire, p}; }

  void validate() const {
    if (tag == Tag::degree_spoof && !(param >= 0.0))
      throw std::invalid_argument("degree_spoof target must be >= 0");
    if (tag == Tag::random_rewire && !(param >= 0.0 && param <= 1.0))
      throw std::invalid_argument("random_rewire probability must be in [0, 1]");
  }

  friend bool operator==(const AdversaryKind&, const AdversaryKind&) = default;
};

inline std::string to_string(const AdversaryKind& kind) {
  auto number = [](double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
  };
  switch (kind.tag) {
    case AdversaryKind::Tag::none: return "none";
    case AdversaryKind::Tag::isolate: return "isolate";
    case AdversaryKind::Tag::clique_plant: return "clique_plant";
    case AdversaryKind::Tag::degree_spoof: return "degree_spoof:" + number(kind.param);
    case AdversaryKind::Tag::cut_heavy: return "cut_heavy";
    case AdversaryKind::Tag::random_rewire: return "random_rewire:" + number(kind.param);
  }
  return "none";
}

/// Parses "isolate", "degree_spoof:50", "random_rewire:0.3", ...
inline AdversaryKind parse_adversary(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  double param = std::numeric_limits<double>::quiet_NaN();
  if (colon != std::string_view::npos) {
    const std::string_view arg = text.substr(colon + 1);
    auto r = std::from_chars(arg.data(), arg.data() + arg.size(), param);
    if (r.ec != std::errc{} || r.ptr != arg.data() + arg.size())
      throw std::invalid_argument("bad adversary parameter in \"" + std::string(text) + "\"");
  }
  const bool has_param = colon != std::string_view::npos;
  auto no_param = [&](AdversaryKind k) {
    if (has_param)
      throw std::invalid_argument("adversary \"" + std::string(name) + "\" takes no parameter");
    return k;
  };
  AdversaryKind kind;
  if (name == "none") kind = no_param(AdversaryKind::none());
  else if (name == "isolate") kind = no_param(AdversaryKind::isolate());
  else if (name == "clique_plant") kind = no_param(AdversaryKind::clique_plant());
  else if (name == "cut_heavy") kind = no_param(AdversaryKind::cut_heavy());
  else if (name == "degree_spoof" || name == "random_rewire") {
    if (!has_param)
      throw std::invalid_argument("adversary \"" + std::string(name) + "\" needs a parameter");
    kind = name == "degree_spoof" ? AdversaryKind::degree_spoof(param)
                                  : AdversaryKind::random_rewire(param);
  } else {
    throw std::invalid_argument("unknown adversary \"" + std::string(text) + "\"");
  }
  kind.validate();
  return kind;
}

struct CorruptedInstance {
  Graph clean;
  Graph corrupted;
  NodeSet corrupted_set;
  double eta = 0.0;
  /// Ground-truth degree parameter; NaN when unknown.
  double d0 = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::vector<Node> random_subset(std::size_t n, std::size_t k, Xoshiro256& rng) {
  std::vector<Node> pool(n);
  std::iota(pool.begin(), pool.end(), Node{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Highest-degree nodes; ties go to the lowest index.
inline std::vector<Node> top_degree_nodes(const Graph& g, std::size_t k) {
  std::vector<Node> order(g.size());
  std::iota(order.begin(), order.end(), Node{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Node a, Node b) { return g.degree(a) > g.degree(b); });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

/// Mutable edge set used while an adversary rewires the graph.
class EdgeSet {
 public:
  explicit EdgeSet(const Graph& g) : n_(g.size()), rows_(g.size()) {
    for (Node v = 0; v < n_; ++v) {
      auto nb = g.neighbors(v);
      rows_[v].insert(nb.begin(), nb.end());
    }
  }

  void add(Node u, Node v) {
    if (u == v) return;
    rows_[u].insert(v);
    rows_[v].insert(u);
  }

  void remove(Node u, Node v) {
    rows_[u].erase(v);
    rows_[v].erase(u);
  }

  void clear_node(Node v) {
    for (Node u : rows_[v]) rows_[u].erase(v);
    rows_[v].clear();
  }

  bool has(Node u, Node v) const { return rows_[u].count(v) > 0; }
  std::size_t degree(Node v) const { return rows_[v].size(); }
  const std::set<Node>& row(Node v) const { return rows_[v]; }

  Graph build() const {
    std::vector<Edge> edges;
    for (Node u = 0; u < n_; ++u)
      for (Node v : rows_[u])
        if (u < v) edges.emplace_back(u, v);
    return Graph::from_sorted_edges(n_, edges);
  }

 private:
  std::size_t n_;
  std::vector<std::set<Node>> rows_;
};

}  // namespace detail

/// Corrupts floor(eta * n) nodes of `clean` with the given strategy.
///
/// Adversaries are adaptive: they inspect the clean graph before choosing the
/// corrupted set (isolate) or rewiring (cut_heavy). Strategies that pick the
/// set at random draw it from a Xoshiro256 stream seeded with `seed`.
inline CorruptedInstance corrupt(const Graph& clean, double eta, const AdversaryKind& kind,
                                 std::uint64_t seed,
                                 double d0 = std::numeric_limits<double>::quiet_NaN()) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("corrupt: eta must be in [0, 1)");
  kind.validate();
  const std::size_t n = clean.size();
  if (kind.tag == AdversaryKind::Tag::degree_spoof && n > 0 &&
      kind.param > static_cast<double>(n - 1))
    throw std::invalid_argument("degree_spoof target exceeds n - 1");

  CorruptedInstance inst;
  inst.clean = clean;
  inst.eta = eta;
  inst.d0 = d0;
  const std::size_t budget = fraction_budget(eta, n);
  if (budget == 0 || kind.tag == AdversaryKind::Tag::none) {
    inst.corrupted = clean;
    inst.corrupted_set = NodeSet(n);
    return inst;
  }

  Xoshiro256 rng(seed);
  std::vector<Node> chosen = kind.tag == AdversaryKind::Tag::isolate
                                 ? detail::top_degree_nodes(clean, budget)
                                 : detail::random_subset(n, budget, rng);
  std::vector<char> in_set(n, 0);
  for (Node v : chosen) in_set[v] = 1;
  detail::EdgeSet edges(clean);

  switch (kind.tag) {
    case AdversaryKind::Tag::none:
      break;
    case AdversaryKind::Tag::isolate:
      for (Node v : chosen) edges.clear_node(v);
      break;
    case AdversaryKind::Tag::clique_plant:
      for (Node v : chosen)
        for (Node u = 0; u < n; ++u) edges.add(v, u);
      break;
    case AdversaryKind::Tag::degree_spoof: {
      // Targets are drawn among uncorrupted nodes, so every corrupted node ends
      // with exactly round(target) edges (capped by the number of uncorrupted
      // nodes available).
      for (Node v : chosen) edges.clear_node(v);
      std::vector<Node> outside;
      for (Node u = 0; u < n; ++u)
        if (!in_set[u]) outside.push_back(u);
      const auto target = static_cast<std::size_t>(std::llround(kind.param));
      const std::size_t take = std::min(target, outside.size());
      for (Node v : chosen) {
        for (std::size_t i = 0; i < take; ++i) {
          const std::size_t j = i + rng.below(outside.size() - i);
          std::swap(outside[i], outside[j]);
          edges.add(v, outside[i]);
        }
      }
      break;
    }
    case AdversaryKind::Tag::cut_heavy: {
      // Keep edges inside the set, drop every cut edge, then spend the same
      // number of cut edges per corrupted node on the currently lowest-degree
      // outside nodes (ties: lowest index).
      std::vector<std::size_t> cut_degree(n, 0);
      for (Node v : chosen) {
        std::vector<Node> outside_nb;
        for (Node u : edges.row(v))
          if (!in_set[u]) outside_nb.push_back(u);
        cut_degree[v] = outside_nb.size();
        for (Node u : outside_nb) edges.remove(v, u);
      }
      std::set<std::pair<std::size_t, Node>> by_degree;
      for (Node u = 0; u < n; ++u)
        if (!in_set[u]) by_degree.emplace(edges.degree(u), u);
      for (Node v : chosen) {
        std::vector<std::pair<std::size_t, Node>> picked;
        for (auto it = by_degree.begin(); it != by_degree.end() && picked.size() < cut_degree[v];
             ++it)
          picked.push_back(*it);
        for (const auto& entry : picked) {
          by_degree.erase(entry);
          edges.add(v, entry.second);
          by_degree.emplace(entry.first + 1, entry.second);
        }
      }
      break;
    }
    case AdversaryKind::Tag::random_rewire: {
      // Each pair touching the set is visited once, ordered by (min, max).
      for (Node v : chosen) {
        for (Node u = 0; u < n; ++u) {
          if (u == v || (in_set[u] && u < v)) continue;
          if (rng.bernoulli(kind.param)) edges.add(v, u);
          else edges.remove(v, u);
        }
      }
      break;
    }
  }

  inst.corrupted = edges.build();
  inst.corrupted_set = NodeSet(n, std::move(chosen));
  return inst;
}

/// Samples G(n, d0/n) and corrupts it; the two streams use seeds derived from `seed`.
inline CorruptedInstance make_instance(std::size_t n, double d0, double eta,
                                       const AdversaryKind& kind, std::uint64_t seed) {
  Graph clean = sample_er(n, d0, derive_seed(seed, 1));
  return corrupt(clean, eta, kind, derive_seed(seed, 2), d0);
}

}  // namespace robustdeg
