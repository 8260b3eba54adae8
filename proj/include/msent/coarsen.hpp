#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msent/errors.hpp"
#include "msent/graph.hpp"

namespace msent {

// One multilevel step: fine nodes grouped into coarse nodes. membership[i]
// is the coarse id of fine node i; sets[r] lists the fine members of coarse
// node r (singletons included). Every set must induce a connected subgraph
// of the fine graph.
struct ContractionLevel {
  std::vector<int> membership;
  int n_fine = 0;
  int n_coarse = 0;
  std::vector<std::vector<int>> sets;

  double reduction_ratio() const {
    return 1.0 - static_cast<double>(n_coarse) / static_cast<double>(n_fine);
  }
};

// Full reduction G_0 -> ... -> G_c. graphs.front() is the input,
// graphs.back() the result; graphs[l+1] = contract(graphs[l], levels[l]).
struct CoarseSequence {
  std::vector<ContractionLevel> levels;
  std::vector<Graph> graphs;
  double target_fraction = 1.0;
  int target_nodes = 0;
  bool reached_target = false;
  std::string stop_reason;  // "target" | "max_levels" | "negligible" | "stalled"

  const Graph& final_graph() const { return graphs.back(); }

  // Overall reduction r = 1 - prod(1 - r_l).
  double overall_reduction() const {
    double keep = 1.0;
    for (const ContractionLevel& lv : levels) keep *= 1.0 - lv.reduction_ratio();
    return 1.0 - keep;
  }
};

// First k eigenpairs of a graph Laplacian, ascending eigenvalue. Columns are
// orthonormal with a fixed sign (largest-magnitude entry positive) so equal
// inputs give identical bases.
struct SpectralBasis {
  int k = 0;
  Eigen::MatrixXd vectors;  // n x k
  Eigen::VectorXd values;   // k
};

inline SpectralBasis spectral_basis(const Laplacian& lap, int k) {
  const Eigen::Index n = lap.mat.rows();
  if (k < 1 || k > n) throw param_error("spectral basis size k must be in [1, n]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap.mat);
  if (solver.info() != Eigen::Success) throw numeric_error("eigensolver failed to converge");
  SpectralBasis basis;
  basis.k = k;
  basis.vectors = solver.eigenvectors().leftCols(k);
  basis.values = solver.eigenvalues().head(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    basis.vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (basis.vectors(arg, c) < 0.0) basis.vectors.col(c) = -basis.vectors.col(c);
  }
  return basis;
}

namespace detail {

inline bool set_is_connected(const Graph& g, const std::vector<int>& set) {
  if (set.size() <= 1) return true;
  std::vector<char> in_set(static_cast<size_t>(g.node_count()), 0);
  for (int v : set) in_set[static_cast<size_t>(v)] = 1;
  std::vector<int> stack{set.front()};
  std::vector<char> visited(static_cast<size_t>(g.node_count()), 0);
  visited[static_cast<size_t>(set.front())] = 1;
  size_t reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : g.neighbors(v)) {
      if (!in_set[static_cast<size_t>(nb.node)] || visited[static_cast<size_t>(nb.node)]) continue;
      visited[static_cast<size_t>(nb.node)] = 1;
      ++reached;
      stack.push_back(nb.node);
    }
  }
  return reached == set.size();
}

}  // namespace detail

// Collapses each contraction set to one node. Superedge weights sum the fine
// weights crossing between two sets; within-set weights vanish (no
// self-loops), which matches the projected Laplacian exactly.
inline Graph contract(const Graph& g, const ContractionLevel& level) {
  const int n = g.node_count();
  if (static_cast<int>(level.membership.size()) != n)
    throw param_error("contraction membership size does not match graph");
  if (level.n_coarse < 1) throw param_error("contraction must keep at least one node");
  std::vector<char> seen(static_cast<size_t>(level.n_coarse), 0);
  for (int id : level.membership) {
    if (id < 0 || id >= level.n_coarse) throw param_error("contraction membership id out of range");
    seen[static_cast<size_t>(id)] = 1;
  }
  for (char s : seen)
    if (!s) throw param_error("contraction membership must cover every coarse id");
  for (const std::vector<int>& set : level.sets)
    if (!detail::set_is_connected(g, set))
      throw param_error("contraction set does not induce a connected subgraph");

  std::map<std::pair<int, int>, double> weights;
  for (const Edge& e : g.edges()) {
    int r = level.membership[static_cast<size_t>(e.u)];
    int s = level.membership[static_cast<size_t>(e.v)];
    if (r == s) continue;
    if (r > s) std::swap(r, s);
    weights[{r, s}] += e.w;
  }
  std::vector<Edge> edges;
  edges.reserve(weights.size());
  for (const auto& [key, w] : weights) edges.push_back({key.first, key.second, w});
  return Graph::from_edges(level.n_coarse, std::move(edges));
}

// Subspace energy an edge contraction would collapse: w_ij * sum_m
// (u_m[i] - u_m[j])^2, aligned with g.edges().
inline std::vector<double> edge_variation_costs(const Graph& g, const SpectralBasis& basis) {
  std::vector<double> costs;
  costs.reserve(g.edges().size());
  for (const Edge& e : g.edges())
    costs.push_back(e.w * (basis.vectors.row(e.u) - basis.vectors.row(e.v)).squaredNorm());
  return costs;
}

// Subspace energy of contracting the closed neighborhood of v, normalized by
// the neighbor count. Isolated nodes get cost 0 (their neighborhood set is a
// singleton and contracts nothing).
inline std::vector<double> neighborhood_variation_costs(const Graph& g, const SpectralBasis& basis) {
  std::vector<double> costs(static_cast<size_t>(g.node_count()), 0.0);
  for (int v = 0; v < g.node_count(); ++v) {
    auto nbrs = g.neighbors(v);
    if (nbrs.empty()) continue;
    double sum = 0.0;
    for (const Neighbor& nb : nbrs)
      sum += nb.w * (basis.vectors.row(nb.node) - basis.vectors.row(v)).squaredNorm();
    costs[static_cast<size_t>(v)] = sum / static_cast<double>(nbrs.size());
  }
  return costs;
}

enum class CoarsenFamily { edge, neighborhood };

inline CoarsenFamily parse_coarsen_family(const std::string& name) {
  if (name == "edge") return CoarsenFamily::edge;
  if (name == "neighborhood") return CoarsenFamily::neighborhood;
  throw param_error("unknown coarsening family: " + name);
}

namespace detail {

struct CandidateSet {
  std::vector<int> nodes;  // sorted ascending
  double cost = 0.0;
};

// Proportional targets per connected component (largest-remainder rounding),
// each pinned to [1, component size]. Components can never merge, so the
// global target is split before any level runs.
inline std::vector<int> component_targets(const std::vector<int>& comp_sizes, int target_total) {
  const int c = static_cast<int>(comp_sizes.size());
  int total = 0;
  for (int s : comp_sizes) total += s;
  std::vector<int> t(static_cast<size_t>(c));
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int i = 0; i < c; ++i) {
    const double quota =
        static_cast<double>(target_total) * comp_sizes[static_cast<size_t>(i)] / total;
    int base = static_cast<int>(std::floor(quota));
    base = std::clamp(base, 1, comp_sizes[static_cast<size_t>(i)]);
    t[static_cast<size_t>(i)] = base;
    assigned += base;
    remainders.push_back({quota - std::floor(quota), i});
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  // Hand out surplus (or claw back deficit) one node at a time, largest
  // remainders first; respects the [1, size] pin so the result may exceed
  // target_total when there are more components than target nodes.
  int guard = 2 * c + 2;
  while (assigned != target_total && guard-- > 0) {
    bool moved = false;
    for (const auto& [rem, i] : remainders) {
      if (assigned < target_total && t[static_cast<size_t>(i)] < comp_sizes[static_cast<size_t>(i)]) {
        ++t[static_cast<size_t>(i)];
        ++assigned;
        moved = true;
      } else if (assigned > target_total && t[static_cast<size_t>(i)] > 1) {
        --t[static_cast<size_t>(i)];
        --assigned;
        moved = true;
      }
      if (assigned == target_total) break;
    }
    if (!moved) break;
  }
  return t;
}

}  // namespace detail

// Multilevel greedy coarsening. Each level: eigenbasis of the current
// Laplacian, variation cost per candidate set (edges or closed
// neighborhoods), candidates sorted by (cost, lexicographic node list),
// disjoint sets accepted while the per-component removal budget allows.
// Budgets cap each level at max_level_reduction of its nodes (but always
// allow one removal) and never cut below the component's share of
// ceil(target_fraction * N). Stops at the target, after max_levels, or when
// a level's reduction falls under 1%.
inline CoarseSequence coarsen_to(const Graph& g, double target_fraction,
                                 CoarsenFamily family = CoarsenFamily::edge, int k = 0,
                                 int max_levels = 20, double max_level_reduction = 0.35) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0))
    throw param_error("target fraction must lie in (0, 1)");
  if (g.node_count() < 1) throw param_error("cannot coarsen an empty graph");
  if (max_levels < 1) throw param_error("max_levels must be positive");
  if (!(max_level_reduction > 0.0 && max_level_reduction < 1.0))
    throw param_error("max_level_reduction must lie in (0, 1)");
  constexpr double kNegligibleReduction = 0.01;

  const int n0 = g.node_count();
  const int target_nodes =
      std::max(1, static_cast<int>(std::ceil(target_fraction * static_cast<double>(n0))));
  if (k == 0) k = std::min(40, target_nodes);
  if (k < 1) throw param_error("k must be positive");

  CoarseSequence seq;
  seq.graphs.push_back(g);
  seq.target_fraction = target_fraction;
  seq.target_nodes = target_nodes;

  // Stable component ids carried across levels (components never merge).
  std::vector<int> comp = connected_components(g);
  int n_comps = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<int> comp_sizes(static_cast<size_t>(n_comps), 0);
  for (int c : comp) ++comp_sizes[static_cast<size_t>(c)];
  const std::vector<int> comp_targets = detail::component_targets(comp_sizes, target_nodes);

  while (true) {
    const Graph& cur = seq.graphs.back();
    const int n = cur.node_count();
    int min_total = 0;
    for (int t : comp_targets) min_total += t;
    if (n <= min_total) {
      seq.reached_target = n <= target_nodes + 1;
      seq.stop_reason = "target";
      break;
    }
    if (static_cast<int>(seq.levels.size()) >= max_levels) {
      seq.stop_reason = "max_levels";
      break;
    }

    std::vector<int> budget(static_cast<size_t>(n_comps), 0);
    for (int c = 0; c < n_comps; ++c) {
      const int sz = comp_sizes[static_cast<size_t>(c)];
      const int room = sz - comp_targets[static_cast<size_t>(c)];
      if (room <= 0) continue;
      const int cap = std::max(
          1, static_cast<int>(std::floor(max_level_reduction * static_cast<double>(sz))));
      budget[static_cast<size_t>(c)] = std::min(room, cap);
    }

    const SpectralBasis basis = spectral_basis(laplacian(cur), std::min(k, n));
    std::vector<detail::CandidateSet> candidates;
    if (family == CoarsenFamily::edge) {
      const std::vector<double> costs = edge_variation_costs(cur, basis);
      candidates.reserve(cur.edges().size());
      for (size_t i = 0; i < cur.edges().size(); ++i) {
        const Edge& e = cur.edges()[i];
        candidates.push_back({{e.u, e.v}, costs[i]});
      }
    } else {
      const std::vector<double> costs = neighborhood_variation_costs(cur, basis);
      for (int v = 0; v < n; ++v) {
        auto nbrs = cur.neighbors(v);
        if (nbrs.empty()) continue;
        std::vector<int> set;
        set.reserve(nbrs.size() + 1);
        set.push_back(v);
        for (const Neighbor& nb : nbrs) set.push_back(nb.node);
        std::sort(set.begin(), set.end());
        candidates.push_back({std::move(set), costs[static_cast<size_t>(v)]});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const detail::CandidateSet& a, const detail::CandidateSet& b) {
                if (a.cost != b.cost) return a.cost < b.cost;
                return a.nodes < b.nodes;
              });

    std::vector<char> used(static_cast<size_t>(n), 0);
    std::vector<int> set_of_node(static_cast<size_t>(n), -1);
    std::vector<std::vector<int>> accepted;
    int total_budget = 0;
    for (int b : budget) total_budget += b;
    int total_removed = 0;
    for (const detail::CandidateSet& cand : candidates) {
      if (total_removed >= total_budget) break;
      const int removal = static_cast<int>(cand.nodes.size()) - 1;
      if (removal < 1) continue;
      bool overlap = false;
      for (int v : cand.nodes)
        if (used[static_cast<size_t>(v)]) { overlap = true; break; }
      if (overlap) continue;
      const int c = comp[static_cast<size_t>(cand.nodes.front())];
      if (removal > budget[static_cast<size_t>(c)]) continue;
      budget[static_cast<size_t>(c)] -= removal;
      total_removed += removal;
      const int set_id = static_cast<int>(accepted.size());
      for (int v : cand.nodes) {
        used[static_cast<size_t>(v)] = 1;
        set_of_node[static_cast<size_t>(v)] = set_id;
      }
      accepted.push_back(cand.nodes);
    }
    if (accepted.empty()) {
      seq.stop_reason = "stalled";
      break;
    }

    // Coarse ids in order of each set's smallest fine node.
    ContractionLevel level;
    level.n_fine = n;
    level.membership.assign(static_cast<size_t>(n), -1);
    std::vector<int> next_comp;
    for (int v = 0; v < n; ++v) {
      if (level.membership[static_cast<size_t>(v)] >= 0) continue;
      const int coarse_id = level.n_coarse++;
      if (set_of_node[static_cast<size_t>(v)] >= 0) {
        const auto& set = accepted[static_cast<size_t>(set_of_node[static_cast<size_t>(v)])];
        for (int u : set) level.membership[static_cast<size_t>(u)] = coarse_id;
        level.sets.push_back(set);
      } else {
        level.membership[static_cast<size_t>(v)] = coarse_id;
        level.sets.push_back({v});
      }
      next_comp.push_back(comp[static_cast<size_t>(v)]);
    }

    Graph coarse = contract(cur, level);
    const double r_level = level.reduction_ratio();
    for (int c = 0; c < n_comps; ++c) comp_sizes[static_cast<size_t>(c)] = 0;
    for (int c : next_comp) ++comp_sizes[static_cast<size_t>(c)];
    comp = std::move(next_comp);
    seq.levels.push_back(std::move(level));
    seq.graphs.push_back(std::move(coarse));
    if (r_level < kNegligibleReduction) {
      const int n_now = seq.graphs.back().node_count();
      if (n_now <= target_nodes + 1) {
        seq.reached_target = true;
        seq.stop_reason = "target";
      } else {
        seq.stop_reason = "negligible";
      }
      break;
    }
  }
  if (seq.stop_reason.empty()) seq.stop_reason = "stalled";
  if (!seq.reached_target)
    seq.reached_target = std::abs(seq.final_graph().node_count() - target_nodes) <= 1;
  return seq;
}

// Composed fine -> final membership of a whole sequence.
inline std::vector<int> composed_membership(const CoarseSequence& seq) {
  const int n0 = seq.graphs.front().node_count();
  std::vector<int> m(static_cast<size_t>(n0));
  for (int i = 0; i < n0; ++i) m[static_cast<size_t>(i)] = i;
  for (const ContractionLevel& level : seq.levels)
    for (int i = 0; i < n0; ++i)
      m[static_cast<size_t>(i)] = level.membership[static_cast<size_t>(m[static_cast<size_t>(i)])];
  return m;
}

// Restricted spectral similarity of the composed reduction: the worst ratio
// ||x - Pi x||_L / ||x||_L over the basis vectors, where Pi averages x
// within each composed contraction set. Vectors with zero Laplacian energy
// (the constant vector) are skipped.
inline double rss_measure(const Graph& g_fine, const CoarseSequence& seq,
                          const SpectralBasis& basis) {
  const int n = g_fine.node_count();
  const std::vector<int> member = composed_membership(seq);
  const int n_final = seq.final_graph().node_count();
  std::vector<double> sums(static_cast<size_t>(n_final));
  std::vector<int> counts(static_cast<size_t>(n_final));
  std::vector<double> x(static_cast<size_t>(n)), diff(static_cast<size_t>(n));
  double eps = 0.0;
  for (int c = 0; c < basis.k; ++c) {
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = basis.vectors(i, c);
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      sums[static_cast<size_t>(member[static_cast<size_t>(i)])] += x[static_cast<size_t>(i)];
      ++counts[static_cast<size_t>(member[static_cast<size_t>(i)])];
    }
    for (int i = 0; i < n; ++i) {
      const int r = member[static_cast<size_t>(i)];
      diff[static_cast<size_t>(i)] =
          x[static_cast<size_t>(i)] - sums[static_cast<size_t>(r)] / counts[static_cast<size_t>(r)];
    }
    const double den2 = laplacian_energy(g_fine, x);
    if (den2 < 1e-12) continue;
    const double num2 = laplacian_energy(g_fine, diff);
    eps = std::max(eps, std::sqrt(std::max(0.0, num2) / den2));
  }
  return eps;
}

}  // namespace msent
