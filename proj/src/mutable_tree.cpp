#include "aford/mutable_tree.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace aford {

MutableTree::MutableTree(int capacity) : capacity_(capacity) {
  if (capacity < 2) throw std::invalid_argument("MutableTree: capacity must be >= 2");
  const auto total = static_cast<std::size_t>(2 * capacity - 2);
  adj_.assign(total, {kNone, kNone, kNone});
  edge_slot_.assign(total, {kNone, kNone, kNone});
  internal_edges_.reserve(static_cast<std::size_t>(std::max(capacity - 3, 0)));
  adj_[0][0] = 1;
  adj_[1][0] = 0;
}

MutableTree MutableTree::from_cladogram(const Cladogram& t) {
  const int m = t.leaf_count();
  MutableTree out(m);
  out.leaves_ = m;
  out.internals_ = t.internal_count();
  // Cladogram internal v (>= m) maps to capacity + (v - m) = v, since capacity == m.
  for (int v = 0; v < t.vertex_count(); ++v) {
    const auto& nb = t.neighbors(v);
    for (std::size_t s = 0; s < nb.size(); ++s) out.adj_[static_cast<std::size_t>(v)][s] = nb[s];
  }
  for (const Edge& e : t.edges()) out.add_edge_if_internal(e.u, e.v);
  return out;
}

int MutableTree::slot_of(int v, int neighbor) const {
  const auto& a = adj_[static_cast<std::size_t>(v)];
  for (int s = 0; s < 3; ++s) {
    if (a[static_cast<std::size_t>(s)] == neighbor) return s;
  }
  throw StructuralError("MutableTree: " + std::to_string(neighbor) + " is not adjacent to " +
                        std::to_string(v));
}

void MutableTree::set_neighbor(int v, int from, int to) {
  adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(slot_of(v, from))] = to;
}

void MutableTree::add_internal_edge(int a, int b) {
  const int idx = static_cast<int>(internal_edges_.size());
  internal_edges_.push_back({a, b});
  edge_slot_[static_cast<std::size_t>(a)][static_cast<std::size_t>(slot_of(a, b))] = idx;
  edge_slot_[static_cast<std::size_t>(b)][static_cast<std::size_t>(slot_of(b, a))] = idx;
}

void MutableTree::remove_internal_edge(int a, int b) {
  const int sa = slot_of(a, b);
  const int sb = slot_of(b, a);
  const int idx = edge_slot_[static_cast<std::size_t>(a)][static_cast<std::size_t>(sa)];
  const int last = static_cast<int>(internal_edges_.size()) - 1;
  if (idx != last) {
    const Edge moved = internal_edges_[static_cast<std::size_t>(last)];
    internal_edges_[static_cast<std::size_t>(idx)] = moved;
    edge_slot_[static_cast<std::size_t>(moved.u)][static_cast<std::size_t>(slot_of(moved.u, moved.v))] = idx;
    edge_slot_[static_cast<std::size_t>(moved.v)][static_cast<std::size_t>(slot_of(moved.v, moved.u))] = idx;
  }
  internal_edges_.pop_back();
  edge_slot_[static_cast<std::size_t>(a)][static_cast<std::size_t>(sa)] = kNone;
  edge_slot_[static_cast<std::size_t>(b)][static_cast<std::size_t>(sb)] = kNone;
}

void MutableTree::grow(const Edge& e) {
  if (leaves_ >= capacity_) throw StructuralError("MutableTree: capacity exhausted");
  const int leaf = leaves_;
  const int hub = capacity_ + internals_;
  ++leaves_;
  ++internals_;
  adj_[static_cast<std::size_t>(hub)] = {leaf, kNone, kNone};
  adj_[static_cast<std::size_t>(leaf)][0] = hub;
  reattach(leaf, hub, e);
}

int MutableTree::detach(int k) {
  if (leaves_ < 4) throw StructuralError("MutableTree: detach needs at least four leaves");
  const int hub = leaf_anchor(k);
  const auto& h = adj_[static_cast<std::size_t>(hub)];
  int rest[2];
  int r = 0;
  for (int w : h) {
    if (w != k) rest[r++] = w;
  }
  const int a = rest[0];
  const int b = rest[1];
  remove_edge_if_internal(hub, a);
  remove_edge_if_internal(hub, b);
  set_neighbor(a, hub, b);
  set_neighbor(b, hub, a);
  add_edge_if_internal(a, b);
  adj_[static_cast<std::size_t>(hub)] = {k, kNone, kNone};
  return hub;
}

void MutableTree::reattach(int k, int hub, const Edge& e) {
  const int a = e.u;
  const int b = e.v;
  remove_edge_if_internal(a, b);
  set_neighbor(a, b, hub);
  set_neighbor(b, a, hub);
  adj_[static_cast<std::size_t>(hub)] = {k, a, b};
  edge_slot_[static_cast<std::size_t>(hub)] = {kNone, kNone, kNone};
  adj_[static_cast<std::size_t>(k)][0] = hub;
  add_edge_if_internal(hub, a);
  add_edge_if_internal(hub, b);
}

Cladogram MutableTree::to_cladogram() const {
  const int n = leaves_ + internals_;
  std::vector<int> id(adj_.size(), kNone);
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < leaves_; ++j) {
    id[static_cast<std::size_t>(j)] = j;
    labels[static_cast<std::size_t>(j)] = j + 1;
  }
  for (int i = 0; i < internals_; ++i) id[static_cast<std::size_t>(capacity_ + i)] = leaves_ + i;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * leaves_ - 3));
  auto visit = [&](int v) {
    const auto& nb = adj_[static_cast<std::size_t>(v)];
    for (int w : nb) {
      if (w != kNone && w > v) edges.push_back({id[static_cast<std::size_t>(v)], id[static_cast<std::size_t>(w)]});
    }
  };
  for (int j = 0; j < leaves_; ++j) visit(j);
  for (int i = 0; i < internals_; ++i) visit(capacity_ + i);
  return Cladogram::from_labelled_edges(labels, edges);
}

void MutableTree::audit() const {
  // to_cladogram() validates degrees, symmetry and connectivity.
  const Cladogram t = to_cladogram();
  (void)t;
  std::set<std::pair<int, int>> expected;
  for (int i = 0; i < internals_; ++i) {
    const int v = capacity_ + i;
    for (int w : adj_[static_cast<std::size_t>(v)]) {
      if (w != kNone && !is_leaf(w)) expected.emplace(std::min(v, w), std::max(v, w));
    }
  }
  std::set<std::pair<int, int>> listed;
  for (std::size_t i = 0; i < internal_edges_.size(); ++i) {
    const Edge& e = internal_edges_[i];
    listed.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
    if (edge_slot_[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(slot_of(e.u, e.v))] != static_cast<int>(i) ||
        edge_slot_[static_cast<std::size_t>(e.v)][static_cast<std::size_t>(slot_of(e.v, e.u))] != static_cast<int>(i)) {
      throw StructuralError("MutableTree: stale internal-edge slot");
    }
  }
  if (listed != expected || listed.size() != internal_edges_.size()) {
    throw StructuralError("MutableTree: internal-edge list disagrees with adjacency");
  }
  const std::size_t want = leaves_ >= 3 ? static_cast<std::size_t>(leaves_ - 3) : 0;
  if (internal_edges_.size() != want) throw StructuralError("MutableTree: wrong internal-edge count");
}

}  // namespace aford
