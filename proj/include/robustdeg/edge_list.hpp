#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "robustdeg/graph.hpp"

namespace robustdeg {

class EdgeListError : public GraphError {
 public:
  using GraphError::GraphError;
};

/// A file could not be opened or written.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool parse_uints(std::string_view line, std::uint64_t& a, std::uint64_t& b) {
  auto skip_ws = [&](std::size_t pos) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    return pos;
  };
  std::size_t pos = skip_ws(0);
  auto r1 = std::from_chars(line.data() + pos, line.data() + line.size(), a);
  if (r1.ec != std::errc{} || r1.ptr == line.data() + pos) return false;
  pos = static_cast<std::size_t>(r1.ptr - line.data());
  const std::size_t after_first = pos;
  pos = skip_ws(pos);
  if (pos == after_first) return false;
  auto r2 = std::from_chars(line.data() + pos, line.data() + line.size(), b);
  if (r2.ec != std::errc{} || r2.ptr == line.data() + pos) return false;
  pos = skip_ws(static_cast<std::size_t>(r2.ptr - line.data()));
  return pos == line.size();
}

}  // namespace detail

/// Reads the "n m" header followed by m lines "u v".
///
/// Throws EdgeListError on a malformed header or line, an edge-count mismatch,
/// out-of-range ids, self-loops and duplicate edges. Edges may appear in any
/// order and either orientation.
inline Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw EdgeListError("edge list: missing header");
  std::uint64_t n = 0, m = 0;
  if (!detail::parse_uints(line, n, m))
    throw EdgeListError("edge list: malformed header \"" + line + "\"");
  std::vector<Edge> edges;
  edges.reserve(m);
  while (next_line()) {
    std::uint64_t u = 0, v = 0;
    if (!detail::parse_uints(line, u, v))
      throw EdgeListError("edge list: malformed line " + std::to_string(line_no));
    if (u >= n || v >= n)
      throw EdgeListError("edge list: node id out of range on line " + std::to_string(line_no));
    if (u == v) throw EdgeListError("edge list: self-loop on line " + std::to_string(line_no));
    edges.emplace_back(static_cast<Node>(u), static_cast<Node>(v));
  }
  if (edges.size() != m)
    throw EdgeListError("edge list: header declares " + std::to_string(m) + " edges, found " +
                        std::to_string(edges.size()));
  try {
    return Graph::from_edges(n, std::move(edges));
  } catch (const EdgeListError&) {
    throw;
  } catch (const GraphError& e) {
    throw EdgeListError(std::string("edge list: ") + e.what());
  }
}

inline Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path);
  return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.size() << ' ' << g.edge_count() << '\n';
  for (Node u = 0; u < g.size(); ++u)
    for (Node v : g.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
}

inline std::string to_edge_list_string(const Graph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

inline void write_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot open " + path + " for writing");
  write_edge_list(out, g);
  if (!out) throw FileError("write failed: " + path);
}

}  // namespace robustdeg
