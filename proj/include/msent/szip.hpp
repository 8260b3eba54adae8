#pragma once

#include <algorithm>
#include <vector>

#include "msent/arith.hpp"
#include "msent/bits.hpp"
#include "msent/graph.hpp"

namespace msent {

// Two-phase structural encoding. Phase one walks an ordered partition of
// the remaining vertices, emitting per-block neighbor counts (B1) and
// singleton adjacency bits (B2); phase two arithmetic-codes both streams.
// length_bits is the structural entropy estimate L(G).
struct EncodedGraph {
  int n = 0;
  BitString b1;
  BitString b2;
  BitString coded_b1;
  BitString coded_b2;

  size_t length_bits() const { return coded_b1.size() + coded_b2.size(); }
};

namespace detail {

// Ordered partition walk shared by encode and decode. At every step the
// first vertex of the first block is removed, one count or bit is produced
// per remaining block, and every block splits into (neighbors, rest).
template <typename BlockFn>
void szip_walk(int n, BlockFn&& on_block) {
  std::vector<std::vector<int>> blocks;
  if (n > 0) {
    blocks.emplace_back(static_cast<size_t>(n));
    auto& all = blocks.front();
    for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  }
  while (!blocks.empty()) {
    const int v = blocks.front().front();
    blocks.front().erase(blocks.front().begin());
    if (blocks.front().empty()) blocks.erase(blocks.begin());

    std::vector<std::vector<int>> next;
    next.reserve(blocks.size() * 2);
    for (auto& block : blocks) {
      // on_block reports which members are neighbors of v.
      std::vector<char> is_neighbor(block.size(), 0);
      on_block(v, block, is_neighbor);
      std::vector<int> nb, rest;
      for (size_t i = 0; i < block.size(); ++i)
        (is_neighbor[i] ? nb : rest).push_back(block[i]);
      if (!nb.empty()) next.push_back(std::move(nb));
      if (!rest.empty()) next.push_back(std::move(rest));
    }
    blocks = std::move(next);
  }
}

}  // namespace detail

// Weights are ignored: the encoding sees the binarized structure.
inline EncodedGraph szip_encode(const Graph& g) {
  EncodedGraph enc;
  enc.n = g.node_count();
  detail::szip_walk(g.node_count(), [&](int v, const std::vector<int>& block,
                                        std::vector<char>& is_neighbor) {
    int count = 0;
    for (size_t i = 0; i < block.size(); ++i) {
      if (g.has_edge(v, block[i])) {
        is_neighbor[i] = 1;
        ++count;
      }
    }
    if (block.size() > 1)
      enc.b1.append_uint(static_cast<uint64_t>(count), count_field_width(block.size()));
    else
      enc.b2.push_back(count != 0);
  });
  enc.coded_b1 = arith_encode(enc.b1);
  enc.coded_b2 = arith_encode(enc.b2);
  return enc;
}

// Replays the partition walk, designating the first `count` members of each
// block as neighbors. The output carries fresh labels in removal order and
// is isomorphic to the encoded graph: vertices sharing a block are
// interchangeable because they have identical adjacency to every vertex
// removed so far.
inline Graph szip_decode(const EncodedGraph& enc) {
  BitString b1 = arith_decode(enc.coded_b1, enc.b1.size());
  BitString b2 = arith_decode(enc.coded_b2, enc.b2.size());
  BitReader r1(b1), r2(b2);
  std::vector<Edge> edges;
  detail::szip_walk(enc.n, [&](int v, const std::vector<int>& block,
                               std::vector<char>& is_neighbor) {
    size_t count;
    if (block.size() > 1) {
      count = r1.read_uint(count_field_width(block.size()));
      if (count > block.size()) throw numeric_error("szip stream inconsistent: count exceeds block");
    } else {
      count = r2.read_bit() ? 1 : 0;
    }
    for (size_t i = 0; i < count; ++i) {
      is_neighbor[i] = 1;
      edges.push_back({std::min(v, block[i]), std::max(v, block[i]), 1.0});
    }
  });
  if (!r1.exhausted() || !r2.exhausted()) throw numeric_error("szip stream has trailing bits");
  return Graph::from_edges(enc.n, std::move(edges));
}

// L(G) in bits. Weighted graphs are measured on their binarized structure.
inline size_t compression_entropy(const Graph& g) { return szip_encode(g).length_bits(); }

}  // namespace msent
