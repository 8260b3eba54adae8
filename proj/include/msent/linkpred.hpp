#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msent/errors.hpp"
#include "msent/graph.hpp"

namespace msent {

enum class LinkScorer { jaccard, adamic_adar };

inline LinkScorer parse_link_scorer(const std::string& name) {
  if (name == "jaccard") return LinkScorer::jaccard;
  if (name == "adamic-adar" || name == "adamic_adar") return LinkScorer::adamic_adar;
  throw param_error("unknown link scorer: " + name);
}

inline const char* link_scorer_name(LinkScorer s) {
  return s == LinkScorer::jaccard ? "jaccard" : "adamic-adar";
}

namespace detail {

// Neighbor list of u with the edge (ma, mb) masked out. Order stays
// ascending, so sums over it are reproducible regardless of how the
// masked graph was obtained.
class MaskedNeighbors {
 public:
  MaskedNeighbors(const Graph& g, int u, int ma, int mb)
      : nbrs_(g.neighbors(u)), skip_(u == ma ? mb : (u == mb ? ma : -1)) {}

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const Neighbor& nb : nbrs_)
      if (nb.node != skip_) fn(nb.node);
  }

 private:
  std::span<const Neighbor> nbrs_;
  int skip_;
};

inline int masked_degree(const Graph& g, int w, int ma, int mb) {
  return g.degree(w) - ((w == ma || w == mb) ? 1 : 0);
}

}  // namespace detail

// Similarity of the non-adjacent pair (u, v) in g with the edge (ma, mb)
// removed; pass ma = mb = -1 to score on g itself. Intersections walk both
// sorted neighbor lists, so equal inputs give bit-identical results.
inline double score_pair(const Graph& g, int u, int v, int ma, int mb, LinkScorer scorer) {
  if (u == v) throw param_error("link scores need two distinct nodes");
  auto nu = g.neighbors(u);
  auto nv = g.neighbors(v);
  const int skip_u = (u == ma) ? mb : (u == mb) ? ma : -1;
  const int skip_v = (v == ma) ? mb : (v == mb) ? ma : -1;
  size_t i = 0, j = 0;
  int inter = 0, du = 0, dv = 0;
  double aa = 0.0;
  while (i < nu.size() || j < nv.size()) {
    if (i < nu.size() && nu[i].node == skip_u) { ++i; continue; }
    if (j < nv.size() && nv[j].node == skip_v) { ++j; continue; }
    if (j == nv.size() || (i < nu.size() && nu[i].node < nv[j].node)) {
      ++du; ++i;
    } else if (i == nu.size() || nv[j].node < nu[i].node) {
      ++dv; ++j;
    } else {
      const int w = nu[i].node;
      ++inter; ++du; ++dv; ++i; ++j;
      if (scorer == LinkScorer::adamic_adar)
        aa += 1.0 / std::log(static_cast<double>(detail::masked_degree(g, w, ma, mb)));
    }
  }
  if (scorer == LinkScorer::adamic_adar) return aa;
  const int uni = du + dv - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double jaccard(const Graph& g, int u, int v) {
  return score_pair(g, u, v, -1, -1, LinkScorer::jaccard);
}

inline double adamic_adar(const Graph& g, int u, int v) {
  return score_pair(g, u, v, -1, -1, LinkScorer::adamic_adar);
}

// Rank assigned to tied scores: "optimistic" counts only strictly greater
// rivals; "mean" averages over the tie group (can be half-integral).
enum class RankTies { optimistic, mean };

// Leave-one-out record for one observed edge: its similarity score in the
// graph with that edge hidden, and its rank among all `candidates`
// non-adjacent pairs of the masked graph.
struct RankRecord {
  int u = 0;
  int v = 0;
  double score = 0.0;
  double rank = 0.0;  // integral under optimistic ties
  uint64_t candidates = 0;
};

// Ranks every edge by hiding it and scoring it against all non-adjacent
// pairs. Only pairs with at least one common neighbor can score above
// zero, so those are the only candidates enumerated; the resulting counts
// are identical to scoring every non-adjacent pair.
inline std::vector<RankRecord> loo_ranks(const Graph& g, LinkScorer scorer,
                                         RankTies ties = RankTies::optimistic) {
  const int64_t n = g.node_count();
  const uint64_t candidates =
      static_cast<uint64_t>(n * (n - 1) / 2 - static_cast<int64_t>(g.edges().size()) + 1);
  std::vector<RankRecord> records;
  records.reserve(g.edges().size());
  std::vector<char> adjacent(static_cast<size_t>(n), 0);
  std::vector<uint32_t> seen(static_cast<size_t>(n), 0);
  uint32_t stamp = 0;

  for (const Edge& e : g.edges()) {
    const int a = e.u, b = e.v;
    const double s0 = score_pair(g, a, b, a, b, scorer);
    uint64_t greater = 0, equal = 0, positive = 0;
    for (int u = 0; u < n; ++u) {
      detail::MaskedNeighbors nu(g, u, a, b);
      nu.for_each([&](int x) { adjacent[static_cast<size_t>(x)] = 1; });
      ++stamp;
      nu.for_each([&](int w) {
        detail::MaskedNeighbors nw(g, w, a, b);
        nw.for_each([&](int x) {
          if (x <= u || adjacent[static_cast<size_t>(x)]) return;
          if (seen[static_cast<size_t>(x)] == stamp) return;
          seen[static_cast<size_t>(x)] = stamp;
          if (u == a && x == b) return;  // the hidden edge is the target, not a rival
          ++positive;
          const double s = score_pair(g, u, x, a, b, scorer);
          if (s > s0)
            ++greater;
          else if (s == s0)
            ++equal;
        });
      });
      nu.for_each([&](int x) { adjacent[static_cast<size_t>(x)] = 0; });
    }
    if (s0 == 0.0) equal = candidates - 1 - positive;  // zero-score rivals are not enumerated
    double rank = static_cast<double>(greater) + 1.0;
    if (ties == RankTies::mean) rank += static_cast<double>(equal) / 2.0;
    records.push_back({a, b, s0, rank, candidates});
  }
  return records;
}

// Entropy of the leave-one-out rank distribution over floor(n/2) equal-width
// bins spanning ranks 1..R_max, R_max = C(n,2) - |E| + 1 (the candidate count
// of every masked graph). Natural log; ranks past R_max land in the last bin
// and are tallied in `clamped`.
struct RankEntropy {
  double entropy = 0.0;
  uint64_t clamped = 0;
  uint64_t rank_max = 1;
  int bins = 1;
  std::vector<uint64_t> bin_counts;
};

inline RankEntropy rank_entropy(const std::vector<RankRecord>& records, const Graph& g) {
  const int64_t n = g.node_count();
  if (n < 4) throw param_error("rank entropy needs at least 4 nodes (2 bins)");
  if (records.empty()) throw param_error("rank entropy is undefined without edges");
  const int64_t m = static_cast<int64_t>(g.edges().size());
  RankEntropy out;
  out.rank_max = static_cast<uint64_t>(n * (n - 1) / 2 - m + 1);
  out.bins = static_cast<int>(n / 2);
  out.bin_counts.assign(static_cast<size_t>(out.bins), 0);

  const double width = static_cast<double>(out.rank_max) / static_cast<double>(out.bins);
  for (const RankRecord& r : records) {
    int64_t bin = 1 + static_cast<int64_t>(std::floor((r.rank - 1.0) / width));
    if (bin > out.bins) {
      bin = out.bins;
      ++out.clamped;
    }
    if (bin < 1) bin = 1;
    ++out.bin_counts[static_cast<size_t>(bin - 1)];
  }
  const double total = static_cast<double>(records.size());
  double h = 0.0;
  for (uint64_t c : out.bin_counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  out.entropy = h;
  return out;
}

// H(G): leave-one-out rank entropy under the given scorer.
inline double lp_entropy(const Graph& g, LinkScorer scorer) {
  return rank_entropy(loo_ranks(g, scorer), g).entropy;
}

}  // namespace msent
