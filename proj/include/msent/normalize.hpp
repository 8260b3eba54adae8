#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "msent/errors.hpp"
#include "msent/generators.hpp"
#include "msent/graph.hpp"
#include "msent/linkpred.hpp"
#include "msent/rng.hpp"
#include "msent/szip.hpp"

namespace msent {

// Uniform random baselines matched to a graph's node and edge counts, with
// their measured entropies. Replica r uses the seed derived from
// (ensemble seed, r), so ensembles are reproducible element by element.
struct BaselineEnsemble {
  int n = 0;
  int64_t m_edges = 0;
  int count = 0;
  Seed seed{0};
  LinkScorer scorer = LinkScorer::adamic_adar;
  std::vector<double> l_values;
  std::vector<double> h_values;  // empty when the ensemble skipped rank entropy

  double mean_l() const {
    return std::accumulate(l_values.begin(), l_values.end(), 0.0) / l_values.size();
  }
  double mean_h() const {
    return std::accumulate(h_values.begin(), h_values.end(), 0.0) / h_values.size();
  }
};

// Draws `count` G(n, m) baselines and measures compression length (and rank
// entropy unless with_h is false — the expensive part, skippable when only
// L* is needed).
inline BaselineEnsemble make_ensemble(int n, int64_t m_edges, int count, Seed seed,
                                      LinkScorer scorer = LinkScorer::adamic_adar,
                                      bool with_h = true) {
  if (count < 1) throw param_error("baseline ensemble needs count >= 1");
  BaselineEnsemble ens;
  ens.n = n;
  ens.m_edges = m_edges;
  ens.count = count;
  ens.seed = seed;
  ens.scorer = scorer;
  ens.l_values.reserve(static_cast<size_t>(count));
  if (with_h) ens.h_values.reserve(static_cast<size_t>(count));
  for (int r = 0; r < count; ++r) {
    const Graph baseline =
        erdos_renyi_gnm(n, m_edges, derive_seed(seed, static_cast<uint64_t>(r)));
    ens.l_values.push_back(static_cast<double>(compression_entropy(baseline)));
    if (with_h) ens.h_values.push_back(lp_entropy(baseline, scorer));
  }
  return ens;
}

namespace detail {

inline void check_matched(const Graph& g, const BaselineEnsemble& ens) {
  if (g.node_count() != ens.n ||
      static_cast<int64_t>(g.edges().size()) != ens.m_edges)
    throw param_error("baseline ensemble does not match the graph's node/edge counts");
}

// value / mean with the 0/0 convention: a zero numerator normalizes to 0
// even when the baseline mean is degenerate.
inline double normalize_by_mean(double value, double mean, const std::string& what) {
  if (mean > 0.0) return value / mean;
  if (value == 0.0) return 0.0;
  throw numeric_error("cannot normalize " + what + ": baseline mean is zero");
}

}  // namespace detail

// L*(G): compression length divided by the mean baseline compression length.
inline double normalized_compression(const Graph& g, const BaselineEnsemble& ens) {
  detail::check_matched(g, ens);
  return detail::normalize_by_mean(static_cast<double>(compression_entropy(g)), ens.mean_l(),
                                   "compression entropy");
}

// H*(G): rank entropy divided by the mean baseline rank entropy, both under
// the same scorer and binning.
inline double normalized_lp_entropy(const Graph& g, const BaselineEnsemble& ens,
                                    LinkScorer scorer) {
  detail::check_matched(g, ens);
  if (ens.h_values.empty())
    throw param_error("baseline ensemble was built without rank entropies");
  if (scorer != ens.scorer)
    throw param_error("baseline ensemble was built with a different scorer");
  const double h = lp_entropy(g, scorer);
  return detail::normalize_by_mean(
      h, ens.mean_h(),
      "rank entropy (n=" + std::to_string(ens.n) + ", m=" + std::to_string(ens.m_edges) + ")");
}

}  // namespace msent
