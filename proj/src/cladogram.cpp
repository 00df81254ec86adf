#include "aford/cladogram.hpp"

#include "aford/rational.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace aford {

namespace {

void replace_neighbor(std::vector<int>& adj, int from, int to) {
  auto it = std::find(adj.begin(), adj.end(), from);
  if (it == adj.end()) throw StructuralError("replace_neighbor: missing neighbour");
  *it = to;
}

}  // namespace

std::string CanonicalKey::to_string() const {
  std::ostringstream os;
  os << leaves << ':';
  for (const auto& split : splits) {
    os << '{';
    for (std::size_t i = 0; i < split.size(); ++i) {
      if (i) os << ',';
      os << split[i];
    }
    os << '}';
  }
  return os.str();
}

std::size_t CanonicalKeyHash::operator()(const CanonicalKey& key) const {
  std::size_t h = std::hash<int>{}(key.leaves);
  for (const auto& split : key.splits) {
    for (int l : split) h = h * 1000003u ^ std::hash<int>{}(l);
    h = h * 1000003u ^ 0x9e3779b9u;
  }
  return h;
}

Cladogram::Cladogram() : m_(2), adj_{{1}, {0}} {}

Cladogram Cladogram::from_labelled_edges(std::span<const int> labels, std::span<const Edge> edges) {
  const int n = static_cast<int>(labels.size());
  int m = 0;
  for (int l : labels) {
    if (l < 0) throw StructuralError("negative leaf label");
    if (l > 0) ++m;
  }
  if (m < 2) throw StructuralError("a cladogram needs at least two leaves");

  // Leaves first (by label), then internal vertices in input order.
  std::vector<int> new_id(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
  int next_internal = m;
  for (int v = 0; v < n; ++v) {
    const int l = labels[static_cast<std::size_t>(v)];
    if (l == 0) {
      new_id[static_cast<std::size_t>(v)] = next_internal++;
    } else {
      if (l > m || seen[static_cast<std::size_t>(l)]) {
        throw StructuralError("leaf labels must be a bijection onto 1..m");
      }
      seen[static_cast<std::size_t>(l)] = true;
      new_id[static_cast<std::size_t>(v)] = l - 1;
    }
  }

  Cladogram t;
  t.m_ = m;
  t.adj_.assign(static_cast<std::size_t>(n), {});
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v) {
      throw StructuralError("edge endpoint out of range");
    }
    const int a = new_id[static_cast<std::size_t>(e.u)];
    const int b = new_id[static_cast<std::size_t>(e.v)];
    t.adj_[static_cast<std::size_t>(a)].push_back(b);
    t.adj_[static_cast<std::size_t>(b)].push_back(a);
  }
  t.validate();
  return t;
}

int Cladogram::leaf_vertex(int label) const {
  if (label < 1 || label > m_) {
    throw StructuralError("unknown leaf label " + std::to_string(label));
  }
  return label - 1;
}

bool Cladogram::has_edge(const Edge& e) const {
  if (e.u < 0 || e.u >= vertex_count() || e.v < 0 || e.v >= vertex_count()) return false;
  const auto& a = adj_[static_cast<std::size_t>(e.u)];
  return std::find(a.begin(), a.end(), e.v) != a.end();
}

std::vector<Edge> Cladogram::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count()));
  for (int v = 0; v < vertex_count(); ++v) {
    std::vector<int> nb = adj_[static_cast<std::size_t>(v)];
    std::sort(nb.begin(), nb.end());
    for (int w : nb) {
      if (w > v) out.push_back({v, w});
    }
  }
  return out;
}

void Cladogram::validate() const {
  const int n = vertex_count();
  if (m_ < 2) throw StructuralError("fewer than two leaves");
  const int expected_vertices = m_ == 2 ? 2 : 2 * m_ - 2;
  if (n != expected_vertices) {
    throw StructuralError("vertex count " + std::to_string(n) + " does not match " +
                          std::to_string(m_) + " leaves");
  }
  std::size_t degree_sum = 0;
  for (int v = 0; v < n; ++v) {
    const auto& nb = adj_[static_cast<std::size_t>(v)];
    const std::size_t want = is_leaf(v) ? 1 : 3;
    if (nb.size() != want) {
      throw StructuralError("vertex " + std::to_string(v) + " has degree " +
                            std::to_string(nb.size()) + ", expected " + std::to_string(want));
    }
    for (int w : nb) {
      if (w < 0 || w >= n || w == v) throw StructuralError("bad adjacency entry");
      const auto& back = adj_[static_cast<std::size_t>(w)];
      if (std::count(back.begin(), back.end(), v) != 1) {
        throw StructuralError("adjacency is not symmetric");
      }
    }
    std::vector<int> sorted = nb;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw StructuralError("multi-edge");
    }
    degree_sum += nb.size();
  }
  if (degree_sum != 2 * static_cast<std::size_t>(edge_count())) {
    throw StructuralError("edge count mismatch");
  }
  // Connected with V-1 edges implies acyclic.
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<int> stack{0};
  reached[0] = true;
  int visited = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++visited;
    for (int w : adj_[static_cast<std::size_t>(v)]) {
      if (!reached[static_cast<std::size_t>(w)]) {
        reached[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  if (visited != n) throw StructuralError("tree is not connected");
}

Cladogram insert_leaf(const Cladogram& t, const Edge& e, int new_label) {
  if (!t.has_edge(e)) throw StructuralError("insert_leaf: edge is not in the cladogram");
  const int m = t.m_;
  if (new_label < 1 || new_label > m + 1) {
    throw StructuralError("insert_leaf: new label must lie in 1.." + std::to_string(m + 1));
  }
  // Old leaf vertex v (label v+1) moves to its shifted label; internal ids shift by one.
  auto remap = [&](int v) {
    if (v < m) return (v + 1 >= new_label) ? v + 1 : v;
    return v + 1;
  };
  const int old_n = t.vertex_count();
  const int leaf = new_label - 1;
  const int hub = old_n + 1;

  Cladogram out;
  out.m_ = m + 1;
  out.adj_.assign(static_cast<std::size_t>(old_n + 2), {});
  for (int v = 0; v < old_n; ++v) {
    auto& nb = out.adj_[static_cast<std::size_t>(remap(v))];
    for (int w : t.adj_[static_cast<std::size_t>(v)]) nb.push_back(remap(w));
  }
  const int a = remap(e.u);
  const int b = remap(e.v);
  replace_neighbor(out.adj_[static_cast<std::size_t>(a)], b, hub);
  replace_neighbor(out.adj_[static_cast<std::size_t>(b)], a, hub);
  out.adj_[static_cast<std::size_t>(hub)] = {a, b, leaf};
  out.adj_[static_cast<std::size_t>(leaf)] = {hub};
  return out;
}

Cladogram delete_leaf(const Cladogram& t, int label) {
  const int m = t.m_;
  if (m <= 2) throw StructuralError("delete_leaf: cannot delete from a 2-cladogram");
  const int k = t.leaf_vertex(label);
  const int hub = t.adj_[static_cast<std::size_t>(k)][0];
  std::vector<int> rest;
  for (int w : t.adj_[static_cast<std::size_t>(hub)]) {
    if (w != k) rest.push_back(w);
  }
  const int a = rest.at(0);
  const int b = rest.at(1);

  const int old_n = t.vertex_count();
  std::vector<int> new_id(static_cast<std::size_t>(old_n), -1);
  for (int v = 0; v < m; ++v) {
    if (v != k) new_id[static_cast<std::size_t>(v)] = v < k ? v : v - 1;
  }
  int next = m - 1;
  for (int v = m; v < old_n; ++v) {
    if (v != hub) new_id[static_cast<std::size_t>(v)] = next++;
  }

  Cladogram out;
  out.m_ = m - 1;
  out.adj_.assign(static_cast<std::size_t>(old_n - 2), {});
  for (int v = 0; v < old_n; ++v) {
    if (v == k || v == hub) continue;
    auto& nb = out.adj_[static_cast<std::size_t>(new_id[static_cast<std::size_t>(v)])];
    for (int w : t.adj_[static_cast<std::size_t>(v)]) {
      if (w == hub) {
        nb.push_back(new_id[static_cast<std::size_t>(v == a ? b : a)]);
      } else {
        nb.push_back(new_id[static_cast<std::size_t>(w)]);
      }
    }
  }
  return out;
}

Cladogram relabel(const Cladogram& t, std::span<const int> permutation) {
  const int m = t.m_;
  if (static_cast<int>(permutation.size()) != m) {
    throw std::invalid_argument("relabel: permutation has wrong length");
  }
  std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
  for (int p : permutation) {
    if (p < 1 || p > m || seen[static_cast<std::size_t>(p)]) {
      throw std::invalid_argument("relabel: not a permutation of 1..m");
    }
    seen[static_cast<std::size_t>(p)] = true;
  }
  auto remap = [&](int v) { return v < m ? permutation[static_cast<std::size_t>(v)] - 1 : v; };
  Cladogram out;
  out.m_ = m;
  out.adj_.assign(t.adj_.size(), {});
  for (int v = 0; v < t.vertex_count(); ++v) {
    auto& nb = out.adj_[static_cast<std::size_t>(remap(v))];
    for (int w : t.adj_[static_cast<std::size_t>(v)]) nb.push_back(remap(w));
  }
  return out;
}

bool is_cherry(const Cladogram& t, int label) {
  const int k = t.leaf_vertex(label);
  if (t.leaf_count() <= 3) return true;
  const int hub = t.neighbors(k)[0];
  int leaf_neighbors = 0;
  for (int w : t.neighbors(hub)) leaf_neighbors += t.is_leaf(w) ? 1 : 0;
  return leaf_neighbors >= 2;
}

std::vector<int> cherries(const Cladogram& t) {
  std::vector<int> out;
  for (int label = 1; label <= t.leaf_count(); ++label) {
    if (is_cherry(t, label)) out.push_back(label);
  }
  return out;
}

bool is_external(const Cladogram& t, const Edge& e) { return t.is_leaf(e.u) || t.is_leaf(e.v); }

EdgeClasses classify_edges(const Cladogram& t) {
  EdgeClasses out;
  for (const Edge& e : t.edges()) {
    (is_external(t, e) ? out.external : out.internal).push_back(e);
  }
  return out;
}

CanonicalKey canonical_key(const Cladogram& t) {
  CanonicalKey key;
  key.leaves = t.leaf_count();
  if (t.leaf_count() <= 3) return key;

  // Root at leaf 1; the label set below an internal child of an internal
  // parent is the split side away from label 1.
  const int n = t.vertex_count();
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<int> stack{0};
  parent[0] = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int w : t.neighbors(v)) {
      if (parent[static_cast<std::size_t>(w)] == -1) {
        parent[static_cast<std::size_t>(w)] = v;
        stack.push_back(w);
      }
    }
  }
  std::vector<std::vector<int>> below(static_cast<std::size_t>(n));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    auto& mine = below[static_cast<std::size_t>(v)];
    if (t.is_leaf(v)) {
      if (v != 0) mine.push_back(v + 1);
    } else {
      std::sort(mine.begin(), mine.end());
      if (!t.is_leaf(parent[static_cast<std::size_t>(v)])) key.splits.push_back(mine);
    }
    if (v != 0) {
      auto& up = below[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      up.insert(up.end(), mine.begin(), mine.end());
    }
  }
  std::sort(key.splits.begin(), key.splits.end());
  return key;
}

std::uint64_t cladogram_count(int m) {
  if (m < 2) throw std::invalid_argument("cladogram_count: m must be >= 2");
  return odd_double_factorial(m - 2);
}

std::vector<Cladogram> enumerate_cladograms(int m, int m_max) {
  if (m < 2) throw std::invalid_argument("enumerate_cladograms: m must be >= 2");
  if (m > m_max) {
    throw ResourceGuardError("enumerate_cladograms: m = " + std::to_string(m) +
                             " exceeds the limit " + std::to_string(m_max));
  }
  std::vector<Cladogram> level{Cladogram{}};
  for (int leaves = 2; leaves < m; ++leaves) {
    std::vector<Cladogram> next;
    next.reserve(level.size() * static_cast<std::size_t>(2 * leaves - 3));
    for (const auto& t : level) {
      for (const Edge& e : t.edges()) next.push_back(insert_leaf(t, e, leaves + 1));
    }
    level = std::move(next);
  }
  std::vector<std::pair<CanonicalKey, std::size_t>> keyed;
  keyed.reserve(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) keyed.emplace_back(canonical_key(level[i]), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<Cladogram> out;
  out.reserve(level.size());
  for (const auto& [key, i] : keyed) out.push_back(level[i]);
  return out;
}

bool LabelledCladogram::injective() const {
  std::vector<int> s = sample_to_leaf;
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) == s.end();
}

}  // namespace aford
