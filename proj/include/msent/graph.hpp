#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "msent/errors.hpp"

namespace msent {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  int node = 0;
  double w = 1.0;
};

// Immutable undirected weighted graph. Node ids are 0..n-1, every stored
// edge has u < v and w > 0, and the per-node neighbor lists are sorted.
class Graph {
 public:
  Graph() = default;

  // Validates the edge list strictly: self-loops, duplicates and
  // non-positive weights are rejected.
  static Graph from_edges(int n, std::vector<Edge> edges) {
    if (n < 0) throw param_error("node count must be non-negative");
    for (auto& e : edges) {
      if (e.u == e.v) throw param_error("self-loop on node " + std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u < 0 || e.v >= n) throw param_error("edge endpoint out of range");
      if (!(e.w > 0.0) || !std::isfinite(e.w)) throw param_error("edge weight must be positive");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    for (size_t i = 1; i < edges.size(); ++i) {
      if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
        throw param_error("duplicate edge (" + std::to_string(edges[i].u) + "," +
                          std::to_string(edges[i].v) + ")");
    }
    Graph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    g.adj_.assign(static_cast<size_t>(n), {});
    for (const auto& e : g.edges_) {
      g.adj_[static_cast<size_t>(e.u)].push_back({e.v, e.w});
      g.adj_[static_cast<size_t>(e.v)].push_back({e.u, e.w});
    }
    for (auto& nb : g.adj_)
      std::sort(nb.begin(), nb.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    return g;
  }

  int node_count() const { return n_; }
  size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(int v) const { return adj_[static_cast<size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(adj_[static_cast<size_t>(v)].size()); }

  double average_degree() const {
    return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / n_;
  }

  bool has_edge(int u, int v) const {
    const auto& nb = adj_[static_cast<size_t>(u)];
    auto it = std::lower_bound(nb.begin(), nb.end(), v,
                               [](const Neighbor& a, int x) { return a.node < x; });
    return it != nb.end() && it->node == v;
  }

  double weighted_degree(int v) const {
    double s = 0.0;
    for (const auto& nb : adj_[static_cast<size_t>(v)]) s += nb.w;
    return s;
  }

  // External node labels when the input was compacted; empty means the
  // labels were already 0..n-1.
  const std::vector<uint64_t>& external_ids() const { return external_ids_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

  static Graph with_external_ids(Graph g, std::vector<uint64_t> ids) {
    g.external_ids_ = std::move(ids);
    return g;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<uint64_t> external_ids_;
};

// All weights forced to 1; the edge set is unchanged.
inline Graph binarize(const Graph& g) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (auto& e : edges) e.w = 1.0;
  return Graph::from_edges(g.node_count(), std::move(edges));
}

inline std::vector<int> connected_components(const Graph& g) {
  std::vector<int> comp(static_cast<size_t>(g.node_count()), -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < g.node_count(); ++s) {
    if (comp[static_cast<size_t>(s)] >= 0) continue;
    comp[static_cast<size_t>(s)] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (comp[static_cast<size_t>(nb.node)] < 0) {
          comp[static_cast<size_t>(nb.node)] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return comp;
}

// Dense weighted Laplacian L = D - W. Row sums are zero and the matrix is
// positive semidefinite for every valid Graph.
struct Laplacian {
  Eigen::MatrixXd mat;

  int dim() const { return static_cast<int>(mat.rows()); }
};

inline Laplacian laplacian(const Graph& g) {
  const int n = g.node_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    m(e.u, e.v) -= e.w;
    m(e.v, e.u) -= e.w;
    m(e.u, e.u) += e.w;
    m(e.v, e.v) += e.w;
  }
  return Laplacian{std::move(m)};
}

// Quadratic form x^T L x evaluated over edges; exact for any signal.
inline double laplacian_energy(const Graph& g, std::span<const double> x) {
  double s = 0.0;
  for (const auto& e : g.edges()) {
    const double d = x[static_cast<size_t>(e.u)] - x[static_cast<size_t>(e.v)];
    s += e.w * d * d;
  }
  return s;
}

// Isomorphism-invariant summary: equal fingerprints are necessary (not
// sufficient) for isomorphism. Spectra are compared at 1e-6 granularity.
struct Fingerprint {
  std::vector<int> degrees;       // sorted ascending
  std::vector<double> spectrum;   // sorted ascending, unrounded
  size_t edge_count = 0;

  static constexpr double kSpectrumTol = 1e-6;

  friend bool operator==(const Fingerprint& a, const Fingerprint& b) {
    if (a.degrees != b.degrees || a.edge_count != b.edge_count) return false;
    if (a.spectrum.size() != b.spectrum.size()) return false;
    for (size_t i = 0; i < a.spectrum.size(); ++i)
      if (std::abs(a.spectrum[i] - b.spectrum[i]) > kSpectrumTol) return false;
    return true;
  }
};

inline Fingerprint fingerprint(const Graph& g) {
  Fingerprint f;
  f.edge_count = g.edge_count();
  f.degrees.reserve(static_cast<size_t>(g.node_count()));
  for (int v = 0; v < g.node_count(); ++v) f.degrees.push_back(g.degree(v));
  std::sort(f.degrees.begin(), f.degrees.end());
  if (g.node_count() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(g).mat, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("eigensolver failed in fingerprint");
    f.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + g.node_count());
    std::sort(f.spectrum.begin(), f.spectrum.end());
  }
  return f;
}

namespace detail {

inline bool is_comment_line(const std::string& line, std::string_view& body) {
  size_t i = line.find_first_not_of(" \t\r");
  if (i == std::string::npos || line[i] != '#') return false;
  body = std::string_view(line).substr(i + 1);
  return true;
}

}  // namespace detail

// Parses whitespace-separated "u v" / "u v w" lines; '#' lines are comments.
// A "# nodes: N" directive (written by write_edge_list) pins the node count
// so graphs with isolated vertices round-trip. Ids already equal to 0..n-1
// are kept; anything else is compacted in first-appearance order with the
// original labels kept in a side map.
inline Graph load_edge_list(std::istream& in) {
  struct RawEdge {
    uint64_t u, v;
    double w;
  };
  std::vector<RawEdge> raw;
  std::string line;
  size_t line_no = 0;
  long long pinned_nodes = -1;

  auto parse_u64 = [&](std::string_view tok) {
    uint64_t val = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), val);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw parse_error("expected a non-negative integer node id, got '" + std::string(tok) + "'",
                        line_no);
    return val;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view comment_body;
    if (detail::is_comment_line(line, comment_body)) {
      std::istringstream cs{std::string(comment_body)};
      std::string key;
      long long value = -1;
      if (cs >> key >> value && key == "nodes:" && value >= 0) {
        if (pinned_nodes >= 0 && pinned_nodes != value)
          throw parse_error("conflicting 'nodes:' directives", line_no);
        pinned_nodes = value;
      }
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 2 && tok.size() != 3)
      throw parse_error("expected 'u v' or 'u v w'", line_no);
    uint64_t u = parse_u64(tok[0]);
    uint64_t v = parse_u64(tok[1]);
    if (u == v) throw parse_error("self-loop on node " + tok[0], line_no);
    double w = 1.0;
    if (tok.size() == 3) {
      auto [p, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), w);
      if (ec != std::errc() || p != tok[2].data() + tok[2].size() || !std::isfinite(w))
        throw parse_error("bad edge weight '" + tok[2] + "'", line_no);
      if (w <= 0.0) throw parse_error("edge weight must be positive", line_no);
    }
    raw.push_back({u, v, w});
  }

  // Decide the id mapping.
  std::unordered_map<uint64_t, int> to_internal;
  std::vector<uint64_t> order;  // first-appearance order
  uint64_t max_id = 0;
  for (const auto& e : raw) {
    for (uint64_t x : {e.u, e.v}) {
      if (to_internal.emplace(x, static_cast<int>(order.size())).second) order.push_back(x);
      max_id = std::max(max_id, x);
    }
  }

  bool identity;
  int n;
  std::vector<uint64_t> side_map;
  if (pinned_nodes >= 0) {
    if (!raw.empty() && max_id >= static_cast<uint64_t>(pinned_nodes))
      throw parse_error("edge endpoint " + std::to_string(max_id) +
                        " out of range for declared node count " + std::to_string(pinned_nodes));
    identity = true;
    n = static_cast<int>(pinned_nodes);
  } else if (order.size() == max_id + 1 || order.empty()) {
    identity = !order.empty();
    n = static_cast<int>(order.size());
  } else {
    identity = false;
    n = static_cast<int>(order.size());
    side_map = order;
  }

  // Collapse duplicates (either orientation) by summing weights.
  std::map<std::pair<int, int>, double> acc;
  for (const auto& e : raw) {
    int u = identity ? static_cast<int>(e.u) : to_internal[e.u];
    int v = identity ? static_cast<int>(e.v) : to_internal[e.v];
    if (u > v) std::swap(u, v);
    acc[{u, v}] += e.w;
  }
  std::vector<Edge> edges;
  edges.reserve(acc.size());
  for (const auto& [key, w] : acc) edges.push_back({key.first, key.second, w});
  Graph g = Graph::from_edges(n, std::move(edges));
  if (!side_map.empty()) g = Graph::with_external_ids(std::move(g), std::move(side_map));
  return g;
}

inline Graph load_edge_list(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

inline Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open edge list file: " + path, 0);
  return load_edge_list(in);
}

inline std::string format_weight(double w) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), w);
  return std::string(buf, p);
}

// Canonical text form: edges sorted lexicographically, weight omitted when
// exactly 1. A "# nodes: N" line is emitted only when the edges alone would
// not pin the node set (isolated vertices or the empty graph).
// load_edge_list(write_edge_list(g)) == g for every Graph.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  bool has_isolated = g.node_count() == 0;
  for (int v = 0; v < g.node_count() && !has_isolated; ++v)
    if (g.degree(v) == 0) has_isolated = true;
  if (has_isolated) out << "# nodes: " << g.node_count() << "\n";
  for (const auto& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (e.w != 1.0) out << ' ' << format_weight(e.w);
    out << '\n';
  }
}

inline std::string write_edge_list(const Graph& g) {
  std::ostringstream out;
  write_edge_list(g, out);
  return out.str();
}

}  // namespace msent
