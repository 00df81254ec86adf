#pragma once

#include "aford/cladogram.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace aford {

/// Binary tree with O(1) leaf insertion, leaf detachment and uniform edge
/// selection. Shared by the growth samplers and the chain simulator.
///
/// Vertex ids: leaf j (label j+1) is vertex j for j < capacity; internal
/// vertices occupy ids >= capacity. Internal edges (both endpoints internal)
/// live in a swap-remove array; external edges are addressed through their
/// leaf.
class MutableTree {
 public:
  /// Two leaves joined by an edge, with room for `capacity` leaves.
  explicit MutableTree(int capacity);

  static MutableTree from_cladogram(const Cladogram& t);

  int capacity() const { return capacity_; }
  int leaf_count() const { return leaves_; }
  bool is_leaf(int v) const { return v < capacity_; }

  /// Internal neighbour of an attached leaf (or the other leaf when m = 2).
  int leaf_anchor(int leaf) const { return adj_[static_cast<std::size_t>(leaf)][0]; }

  /// Neighbour slots of v; unused slots hold -1.
  const std::array<int, 3>& adjacency(int v) const { return adj_[static_cast<std::size_t>(v)]; }

  std::size_t internal_edge_count() const { return internal_edges_.size(); }
  const Edge& internal_edge(std::size_t i) const { return internal_edges_[i]; }
  Edge external_edge(int leaf) const { return {leaf, leaf_anchor(leaf)}; }

  /// Grows the tree: the next leaf (id leaf_count()) hangs off edge `e`.
  void grow(const Edge& e);

  /// Cuts leaf k out and suppresses its anchor. Returns the freed anchor id,
  /// which must be handed back to reattach(). Requires leaf_count() >= 4.
  int detach(int k);

  /// Subdivides `e` with `hub` and hangs leaf k from it.
  void reattach(int k, int hub, const Edge& e);

  /// The labelled cladogram with leaf j carrying label j+1.
  Cladogram to_cladogram() const;

  /// Checks degrees, symmetry and internal-edge bookkeeping against the
  /// adjacency; throws StructuralError. Only valid between moves.
  void audit() const;

 private:
  static constexpr int kNone = -1;

  int slot_of(int v, int neighbor) const;
  void set_neighbor(int v, int from, int to);
  bool internal_pair(int a, int b) const { return !is_leaf(a) && !is_leaf(b); }
  void add_internal_edge(int a, int b);
  void remove_internal_edge(int a, int b);
  void add_edge_if_internal(int a, int b) {
    if (internal_pair(a, b)) add_internal_edge(a, b);
  }
  void remove_edge_if_internal(int a, int b) {
    if (internal_pair(a, b)) remove_internal_edge(a, b);
  }

  int capacity_;
  int leaves_ = 2;
  int internals_ = 0;
  std::vector<std::array<int, 3>> adj_;
  // For internal vertex v and slot s, index into internal_edges_ of the edge
  // to adj_[v][s], or kNone.
  std::vector<std::array<int, 3>> edge_slot_;
  std::vector<Edge> internal_edges_;
};

}  // namespace aford
