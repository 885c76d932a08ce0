#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace mlo {

/// Undirected carrier-sense graph over the APs of one band.
/// Node count is limited to 64 so vertex sets fit in a word.
class ContentionGraph {
 public:
  using VertexSet = std::uint64_t;

  ContentionGraph() = default;
  explicit ContentionGraph(std::size_t n) : n_(n), rows_(n, 0) { assert(n <= 64); }

  std::size_t size() const noexcept { return n_; }

  void connect(std::size_t i, std::size_t j) {
    assert(i < n_ && j < n_);
    if (i == j) return;
    rows_[i] |= VertexSet{1} << j;
    rows_[j] |= VertexSet{1} << i;
  }

  bool adjacent(std::size_t i, std::size_t j) const noexcept {
    return i != j && ((rows_[i] >> j) & 1u) != 0;
  }

  VertexSet neighbors(std::size_t i) const noexcept { return rows_[i]; }

  std::size_t edge_count() const noexcept {
    std::size_t twice = 0;
    for (VertexSet r : rows_) twice += static_cast<std::size_t>(std::popcount(r));
    return twice / 2;
  }

  /// Every edge of `this` is also an edge of `other`.
  bool is_subgraph_of(const ContentionGraph& other) const noexcept {
    if (other.n_ != n_) return false;
    for (std::size_t i = 0; i < n_; ++i)
      if ((rows_[i] & ~other.rows_[i]) != 0) return false;
    return true;
  }

  /// Maximal cliques (Bron-Kerbosch with pivoting). Isolated vertices are
  /// returned as singleton cliques. Output order is deterministic.
  std::vector<VertexSet> maximal_cliques() const {
    std::vector<VertexSet> out;
    const VertexSet all = n_ == 64 ? ~VertexSet{0} : ((VertexSet{1} << n_) - 1);
    expand(0, all, 0, out);
    return out;
  }

 private:
  void expand(VertexSet r, VertexSet p, VertexSet x, std::vector<VertexSet>& out) const {
    if (p == 0 && x == 0) {
      out.push_back(r);
      return;
    }
    // pivot: vertex of P|X with most neighbours in P
    const VertexSet px = p | x;
    std::size_t pivot = static_cast<std::size_t>(std::countr_zero(px));
    int best = -1;
    for (VertexSet s = px; s != 0; s &= s - 1) {
      const auto u = static_cast<std::size_t>(std::countr_zero(s));
      const int c = std::popcount(p & rows_[u]);
      if (c > best) {
        best = c;
        pivot = u;
      }
    }
    for (VertexSet s = p & ~rows_[pivot]; s != 0; s &= s - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(s));
      const VertexSet vb = VertexSet{1} << v;
      expand(r | vb, p & rows_[v], x & rows_[v], out);
      p &= ~vb;
      x |= vb;
    }
  }

  std::size_t n_ = 0;
  std::vector<VertexSet> rows_;
};

}  // namespace mlo
