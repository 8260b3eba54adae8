#pragma once

#include <set>
#include <unordered_set>
#include <vector>

#include "msent/graph.hpp"
#include "msent/rng.hpp"

namespace msent {

namespace detail {

// Packs an unordered pair (u < v < n) into one key for dedup sets.
inline uint64_t pair_key(int u, int v) {
  return (static_cast<uint64_t>(u) << 32) | static_cast<uint32_t>(v);
}

}  // namespace detail

// Preferential attachment from an m-node seed clique: every later node
// attaches to m distinct existing nodes chosen proportionally to degree.
// |E| = C(m,2) + m(n-m).
inline Graph barabasi_albert(int n, int m, Seed seed) {
  if (m < 1 || m >= n) throw param_error("barabasi_albert requires 1 <= m < n");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(m) * (m - 1) / 2 + static_cast<size_t>(m) * (n - m));
  // One entry per edge endpoint; sampling an entry is degree-proportional.
  std::vector<int> endpoints;
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) {
      edges.push_back({u, v, 1.0});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::vector<int> targets;
  std::vector<char> picked(static_cast<size_t>(n), 0);
  for (int t = m; t < n; ++t) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      int c = endpoints.empty() ? static_cast<int>(rng.below(static_cast<uint64_t>(t)))
                                : endpoints[rng.below(endpoints.size())];
      if (picked[static_cast<size_t>(c)]) continue;  // re-draw on collision
      picked[static_cast<size_t>(c)] = 1;
      targets.push_back(c);
    }
    for (int c : targets) {
      picked[static_cast<size_t>(c)] = 0;
      edges.push_back({c, t, 1.0});
      endpoints.push_back(c);
      endpoints.push_back(t);
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

// 4-neighbor lattice; |E| = rows(cols-1) + cols(rows-1).
inline Graph grid2d(int rows, int cols) {
  if (rows < 1 || cols < 1) throw param_error("grid2d requires rows, cols >= 1");
  std::vector<Edge> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1.0});
    }
  }
  return Graph::from_edges(rows * cols, std::move(edges));
}

// Ring lattice (k_near/2 neighbors per side) plus Newman-Watts-style
// additions: each lattice edge spawns one uniformly random extra shortcut
// with probability p_shortcut. No rewiring; duplicate draws are skipped.
inline Graph random_ring(int n, int k_near, double p_shortcut, Seed seed) {
  if (n < 3) throw param_error("random_ring requires n >= 3");
  if (k_near < 2 || k_near % 2 != 0 || k_near >= n)
    throw param_error("random_ring requires even k_near with 2 <= k_near < n");
  if (p_shortcut < 0.0 || p_shortcut > 1.0)
    throw param_error("p_shortcut must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::unordered_set<uint64_t> present;
  auto add = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    if (!present.insert(detail::pair_key(u, v)).second) return false;
    edges.push_back({u, v, 1.0});
    return true;
  };
  for (int i = 0; i < n; ++i)
    for (int off = 1; off <= k_near / 2; ++off) add(i, (i + off) % n);
  const size_t lattice_edges = edges.size();
  for (size_t e = 0; e < lattice_edges; ++e) {
    if (rng.unit() >= p_shortcut) continue;
    auto [a, b] = rng.distinct_pair(n);
    add(a, b);
  }
  return Graph::from_edges(n, std::move(edges));
}

// Pairing-model d-regular graph; the whole pairing restarts whenever it
// produces a self-loop or duplicate edge.
inline Graph random_regular(int n, int d, Seed seed) {
  if (d < 0 || d >= n) throw param_error("random_regular requires 0 <= d < n");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw param_error("random_regular requires n*d even");
  Rng rng(seed);
  std::vector<int> stubs(static_cast<size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < d; ++i) stubs[static_cast<size_t>(v) * d + i] = v;

  constexpr int kMaxRestarts = 1000;
  for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
    rng.shuffle(stubs);
    std::vector<Edge> edges;
    edges.reserve(stubs.size() / 2);
    std::unordered_set<uint64_t> present;
    bool ok = true;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v) {
        ok = false;
        break;
      }
      if (u > v) std::swap(u, v);
      if (!present.insert(detail::pair_key(u, v)).second) {
        ok = false;
        break;
      }
      edges.push_back({u, v, 1.0});
    }
    if (ok) return Graph::from_edges(n, std::move(edges));
  }
  throw numeric_error("random_regular: no simple pairing found after 1000 restarts");
}

// G(n, m): exactly m_edges distinct uniform edges. Densities above half of
// C(n,2) sample the complement instead so rejection stays cheap.
inline Graph erdos_renyi_gnm(int n, long long m_edges, Seed seed) {
  if (n < 0 || m_edges < 0) throw param_error("erdos_renyi_gnm requires n, m >= 0");
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  if (m_edges > max_edges)
    throw param_error("erdos_renyi_gnm: m_edges exceeds C(n,2) = " + std::to_string(max_edges));
  Rng rng(seed);
  auto sample_pairs = [&](long long count) {
    std::unordered_set<uint64_t> chosen;
    chosen.reserve(static_cast<size_t>(count) * 2);
    while (static_cast<long long>(chosen.size()) < count) {
      auto [a, b] = rng.distinct_pair(n);
      chosen.insert(detail::pair_key(a, b));
    }
    return chosen;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(m_edges));
  if (m_edges * 2 <= max_edges) {
    for (uint64_t key : sample_pairs(m_edges))
      edges.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu), 1.0});
  } else {
    auto excluded = sample_pairs(max_edges - m_edges);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (!excluded.contains(detail::pair_key(u, v))) edges.push_back({u, v, 1.0});
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace msent
