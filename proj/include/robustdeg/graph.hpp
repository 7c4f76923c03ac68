#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace robustdeg {

using Node = std::uint32_t;
using Edge = std::pair<Node, Node>;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A set of node indices drawn from [0, universe). Members are kept sorted.
class NodeSet {
 public:
  NodeSet() = default;

  explicit NodeSet(std::size_t universe) : universe_(universe) {}

  NodeSet(std::size_t universe, std::vector<Node> members)
      : universe_(universe), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
      throw GraphError("NodeSet: duplicate member");
    if (!members_.empty() && members_.back() >= universe_)
      throw GraphError("NodeSet: member out of range");
  }

  static NodeSet all(std::size_t universe) {
    NodeSet s(universe);
    s.members_.resize(universe);
    for (std::size_t i = 0; i < universe; ++i) s.members_[i] = static_cast<Node>(i);
    return s;
  }

  /// Builds the set from a membership mask (mask[v] != 0 means v is a member).
  template <typename Mask>
  static NodeSet from_mask(const Mask& mask) {
    NodeSet s(mask.size());
    for (std::size_t v = 0; v < mask.size(); ++v)
      if (mask[v]) s.members_.push_back(static_cast<Node>(v));
    return s;
  }

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  std::span<const Node> members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(Node v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }

  std::vector<char> mask() const {
    std::vector<char> m(universe_, 0);
    for (Node v : members_) m[v] = 1;
    return m;
  }

  NodeSet complement() const {
    NodeSet c(universe_);
    std::size_t j = 0;
    for (std::size_t v = 0; v < universe_; ++v) {
      if (j < members_.size() && members_[j] == v) {
        ++j;
        continue;
      }
      c.members_.push_back(static_cast<Node>(v));
    }
    return c;
  }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<Node> members_;
};

/// Simple undirected graph, immutable after construction.
///
/// Neighbors are stored as sorted CSR rows. For n <= kBitsetLimit a dense
/// adjacency bitset is kept as well, giving O(1) edge queries; above the limit
/// edge queries binary-search the neighbor row.
class Graph {
 public:
  static constexpr std::size_t kBitsetLimit = 4096;

  Graph() : offsets_(1, 0) {}

  static Graph empty(std::size_t n) { return from_sorted_edges(n, {}); }

  static Graph complete(std::size_t n) {
    std::vector<Edge> edges;
    edges.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        edges.emplace_back(static_cast<Node>(i), static_cast<Node>(j));
    return from_sorted_edges(n, edges);
  }

  /// Builds a graph from an arbitrary edge list. Each edge may be given in
  /// either orientation. Rejects self-loops, out-of-range ids and duplicates.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges) {
    for (auto& [u, v] : edges) {
      if (u == v) throw GraphError("self-loop at node " + std::to_string(u));
      if (u >= n || v >= n)
        throw GraphError("node id out of range: " + std::to_string(std::max(u, v)));
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    auto dup = std::adjacent_find(edges.begin(), edges.end());
    if (dup != edges.end())
      throw GraphError("duplicate edge " + std::to_string(dup->first) + " " +
                       std::to_string(dup->second));
    return from_sorted_edges(n, edges);
  }

  /// Fast path: edges must be (u < v), strictly increasing, ids < n.
  static Graph from_sorted_edges(std::size_t n, std::span<const Edge> edges) {
    Graph g;
    g.n_ = n;
    g.m_ = edges.size();
    g.offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
      ++g.offsets_[u + 1];
      ++g.offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adj_.resize(2 * edges.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    // Row-major sorted input yields sorted rows: for fixed u the v's increase,
    // and every smaller neighbor w < u of row u was appended while scanning
    // row w, which comes earlier.
    for (const auto& [u, v] : edges) {
      g.adj_[cursor[u]++] = v;
      g.adj_[cursor[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto row_begin = g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
      auto row_end = g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
      if (!std::is_sorted(row_begin, row_end)) std::sort(row_begin, row_end);
    }
    if (n <= kBitsetLimit) {
      g.words_ = (n + 63) / 64;
      g.bits_.assign(n * g.words_, 0);
      for (const auto& [u, v] : edges) {
        g.bits_[u * g.words_ + v / 64] |= std::uint64_t{1} << (v % 64);
        g.bits_[v * g.words_ + u / 64] |= std::uint64_t{1} << (u % 64);
      }
    }
    return g;
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return m_; }

  std::size_t degree(Node v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::span<const Node> neighbors(Node v) const noexcept {
    return {adj_.data() + offsets_[v], degree(v)};
  }

  bool has_edge(Node u, Node v) const noexcept {
    if (u == v || u >= n_ || v >= n_) return false;
    if (!bits_.empty()) return (bits_[u * words_ + v / 64] >> (v % 64)) & 1U;
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  bool has_bitset() const noexcept { return !bits_.empty(); }

  /// Adjacency row of v as 64-bit words; only valid when has_bitset().
  std::span<const std::uint64_t> bitset_row(Node v) const noexcept {
    return {bits_.data() + v * words_, words_};
  }

  /// All edges (u < v) in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (Node u = 0; u < n_; ++u)
      for (Node v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.offsets_ == b.offsets_ && a.adj_ == b.adj_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Node> adj_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// d(G) = (1/n) * sum_ij A_ij = 2m / n. Zero for the null graph.
inline double average_degree(const Graph& g) noexcept {
  if (g.size() == 0) return 0.0;
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.size());
}

inline std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> d(g.size());
  for (Node v = 0; v < g.size(); ++v) d[v] = g.degree(v);
  return d;
}

/// e_G(S): number of edges with both endpoints in S.
inline std::size_t edge_count_within(const Graph& g, const NodeSet& s) {
  const auto in = s.mask();
  std::size_t count = 0;
  for (Node v : s)
    for (Node u : g.neighbors(v))
      if (u > v && in[u]) ++count;
  return count;
}

/// e_G(S, complement of S): number of edges with exactly one endpoint in S.
inline std::size_t edge_count_cut(const Graph& g, const NodeSet& s) {
  const auto in = s.mask();
  std::size_t count = 0;
  for (Node v : s)
    for (Node u : g.neighbors(v))
      if (!in[u]) ++count;
  return count;
}

/// N(S) = C(s, 2) + s (n - s), the number of node pairs touching a set of size s.
inline std::uint64_t max_possible_incident(std::uint64_t n, std::uint64_t s) {
  if (s > n) throw std::invalid_argument("max_possible_incident: s > n");
  return s * (s - (s > 0 ? 1 : 0)) / 2 + s * (n - s);
}

/// Subgraph induced by `keep`, relabeled so that the i-th smallest kept node
/// becomes node i.
inline Graph induced_subgraph(const Graph& g, const NodeSet& keep) {
  std::vector<Node> relabel(g.size(), static_cast<Node>(-1));
  Node next = 0;
  for (Node v : keep) relabel[v] = next++;
  std::vector<Edge> edges;
  for (Node v : keep)
    for (Node u : g.neighbors(v))
      if (u > v && relabel[u] != static_cast<Node>(-1))
        edges.emplace_back(relabel[v], relabel[u]);
  // Kept ids are visited in increasing order and relabeling is monotone,
  // so the edge list is already lexicographically sorted.
  return Graph::from_sorted_edges(keep.size(), edges);
}

}  // namespace robustdeg
