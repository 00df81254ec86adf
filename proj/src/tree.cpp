#include "aford/tree.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace aford {

FiniteMeasureTree::FiniteMeasureTree(Cladogram shape) : shape_(std::move(shape)) {
  const auto n = static_cast<std::size_t>(shape_.vertex_count());
  parent_.assign(n, -1);
  depth_.assign(n, 0);
  below_.assign(n, 0);
  tin_.assign(n, 0);
  tout_.assign(n, 0);

  // Iterative DFS; combs are as deep as they are wide.
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  std::vector<int> order;
  order.reserve(n);
  int clock = 0;
  parent_[0] = -1;
  tin_[0] = clock++;
  order.push_back(0);
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& nb = shape_.neighbors(v);
    if (next < nb.size()) {
      const int w = nb[next++];
      if (w == parent_[static_cast<std::size_t>(v)]) continue;
      parent_[static_cast<std::size_t>(w)] = v;
      depth_[static_cast<std::size_t>(w)] = depth_[static_cast<std::size_t>(v)] + 1;
      tin_[static_cast<std::size_t>(w)] = clock++;
      order.push_back(w);
      stack.emplace_back(w, 0);
    } else {
      tout_[static_cast<std::size_t>(v)] = clock++;
      stack.pop_back();
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (shape_.is_leaf(v)) below_[static_cast<std::size_t>(v)] += 1;
    const int p = parent_[static_cast<std::size_t>(v)];
    if (p >= 0) below_[static_cast<std::size_t>(p)] += below_[static_cast<std::size_t>(v)];
  }
}

int FiniteMeasureTree::lca(int a, int b) const {
  while (depth(a) > depth(b)) a = parent(a);
  while (depth(b) > depth(a)) b = parent(b);
  while (a != b) {
    a = parent(a);
    b = parent(b);
  }
  return a;
}

int FiniteMeasureTree::child_toward(int ancestor, int v) const {
  while (parent(v) != ancestor) v = parent(v);
  return v;
}

int FiniteMeasureTree::component_size(int center, int u) const {
  if (u == center) throw std::invalid_argument("component_size: u is the center");
  if (is_ancestor(center, u)) return leaves_below(child_toward(center, u));
  return leaf_count() - leaves_below(center);
}

int branch_point(const FiniteMeasureTree& tree, int x, int y, int z) {
  const int a = tree.lca(x, y);
  const int b = tree.lca(y, z);
  const int c = tree.lca(x, z);
  // Two of the pairwise LCAs coincide; the median is the deepest one.
  int best = a;
  if (tree.depth(b) > tree.depth(best)) best = b;
  if (tree.depth(c) > tree.depth(best)) best = c;
  return best;
}

std::array<int, 3> component_counts(const FiniteMeasureTree& tree, const std::array<int, 3>& u) {
  for (int v : u) {
    if (v < 0 || v >= tree.vertex_count() || !tree.is_leaf(v)) {
      throw std::invalid_argument("component_counts: arguments must be leaves");
    }
  }
  if (u[0] == u[1] || u[1] == u[2] || u[0] == u[2]) {
    throw std::invalid_argument("component_counts: leaves must be pairwise distinct");
  }
  const int c = branch_point(tree, u[0], u[1], u[2]);
  return {tree.component_size(c, u[0]), tree.component_size(c, u[1]), tree.component_size(c, u[2])};
}

MassVector component_masses(const FiniteMeasureTree& tree, const std::array<int, 3>& u) {
  const auto counts = component_counts(tree, u);
  const int n = tree.leaf_count();
  return {Rational(counts[0], n), Rational(counts[1], n), Rational(counts[2], n)};
}

std::vector<Rational> branch_point_distribution(const FiniteMeasureTree& tree) {
  const int n = tree.leaf_count();
  const Rational p(1, n);
  const Rational leaf_value = 3 * p * p - 2 * p * p * p;
  std::vector<Rational> nu(static_cast<std::size_t>(tree.vertex_count()));
  for (int v = 0; v < tree.vertex_count(); ++v) {
    if (tree.is_leaf(v)) {
      nu[static_cast<std::size_t>(v)] = leaf_value;
      continue;
    }
    Rational product = 6;
    for (int w : tree.cladogram().neighbors(v)) {
      const int size = w == tree.parent(v) ? n - tree.leaves_below(v) : tree.leaves_below(w);
      product *= Rational(size, n);
    }
    nu[static_cast<std::size_t>(v)] = product;
  }
  return nu;
}

std::vector<int> path_between(const FiniteMeasureTree& tree, int x, int y) {
  const int top = tree.lca(x, y);
  std::vector<int> up;
  for (int v = x; v != top; v = tree.parent(v)) up.push_back(v);
  up.push_back(top);
  std::vector<int> down;
  for (int v = y; v != top; v = tree.parent(v)) down.push_back(v);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

Rational r_mu(const FiniteMeasureTree& tree, const std::vector<Rational>& nu, int x, int y) {
  if (x == y) return 0;
  Rational total = 0;
  for (int v : path_between(tree, x, y)) total += nu[static_cast<std::size_t>(v)];
  return total - nu[static_cast<std::size_t>(x)] / 2 - nu[static_cast<std::size_t>(y)] / 2;
}

Rational r_mu(const FiniteMeasureTree& tree, int x, int y) {
  return r_mu(tree, branch_point_distribution(tree), x, y);
}

void write_branch_point_csv(std::ostream& os, const FiniteMeasureTree& tree) {
  const auto nu = branch_point_distribution(tree);
  os << "vertex,label,numerator,denominator\n";
  for (int v = 0; v < tree.vertex_count(); ++v) {
    const auto& value = nu[static_cast<std::size_t>(v)];
    os << v << ',' << tree.cladogram().label_of(v) << ',' << numerator_of(value) << ','
       << denominator_of(value) << '\n';
  }
}

void write_r_mu_csv(std::ostream& os, const FiniteMeasureTree& tree) {
  const auto nu = branch_point_distribution(tree);
  os << "x,y,numerator,denominator\n";
  for (int x = 0; x < tree.vertex_count(); ++x) {
    for (int y = x; y < tree.vertex_count(); ++y) {
      const Rational r = r_mu(tree, nu, x, y);
      os << x << ',' << y << ',' << numerator_of(r) << ',' << denominator_of(r) << '\n';
    }
  }
}

}  // namespace aford
