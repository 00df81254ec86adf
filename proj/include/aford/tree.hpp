#pragma once

#include "aford/cladogram.hpp"
#include "aford/rational.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace aford {

/// Binary tree with N leaves and mass 1/N on every leaf.
///
/// Keeps a rooted view (root = leaf 1) so that branch points, components
/// and subtree masses can be answered by walking parent pointers. The tree
/// is immutable; a chain move produces a new one.
class FiniteMeasureTree {
 public:
  explicit FiniteMeasureTree(Cladogram shape);

  const Cladogram& cladogram() const { return shape_; }
  int leaf_count() const { return shape_.leaf_count(); }
  int vertex_count() const { return shape_.vertex_count(); }
  bool is_leaf(int v) const { return shape_.is_leaf(v); }
  Rational leaf_mass() const { return Rational(1, leaf_count()); }

  int root() const { return 0; }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  int depth(int v) const { return depth_[static_cast<std::size_t>(v)]; }
  int leaves_below(int v) const { return below_[static_cast<std::size_t>(v)]; }
  /// Preorder entry/exit times; a is an ancestor of b (or a == b) iff
  /// entry(a) <= entry(b) && exit(b) <= exit(a).
  int entry(int v) const { return tin_[static_cast<std::size_t>(v)]; }
  int exit(int v) const { return tout_[static_cast<std::size_t>(v)]; }
  bool is_ancestor(int a, int b) const {
    return entry(a) <= entry(b) && exit(b) <= exit(a);
  }

  int lca(int a, int b) const;

  /// The child of `ancestor` on the path down to `v`. Requires
  /// is_ancestor(ancestor, v) and ancestor != v.
  int child_toward(int ancestor, int v) const;

  /// Leaf count of the component of T \ {center} that contains `u`.
  int component_size(int center, int u) const;

 private:
  Cladogram shape_;
  std::vector<int> parent_;
  std::vector<int> depth_;
  std::vector<int> below_;
  std::vector<int> tin_;
  std::vector<int> tout_;
};

/// Masses of the three components around a branch point; sums to 1.
using MassVector = std::array<Rational, 3>;

/// The median c(x, y, z): the unique vertex on all three pairwise paths.
int branch_point(const FiniteMeasureTree& tree, int x, int y, int z);

/// Leaf counts of the components of T \ {c(u)} containing u[0], u[1], u[2].
/// u must be pairwise distinct leaves.
std::array<int, 3> component_counts(const FiniteMeasureTree& tree, const std::array<int, 3>& u);

MassVector component_masses(const FiniteMeasureTree& tree, const std::array<int, 3>& u);

/// Law of c(U1, U2, U3) for i.i.d. uniform leaves, indexed by vertex id.
/// Internal vertex with component masses (a, b, c): 6abc. Leaf with mass p:
/// 3p^2 - 2p^3 (at least two of the three draws hit it).
std::vector<Rational> branch_point_distribution(const FiniteMeasureTree& tree);

/// Vertices of the path [x, y], from x to y.
std::vector<int> path_between(const FiniteMeasureTree& tree, int x, int y);

/// nu([x, y]) - nu({x})/2 - nu({y})/2.
Rational r_mu(const FiniteMeasureTree& tree, int x, int y);
Rational r_mu(const FiniteMeasureTree& tree, const std::vector<Rational>& nu, int x, int y);

/// CSV with columns vertex,label,numerator,denominator.
void write_branch_point_csv(std::ostream& os, const FiniteMeasureTree& tree);

/// CSV with columns x,y,numerator,denominator for every vertex pair x <= y.
void write_r_mu_csv(std::ostream& os, const FiniteMeasureTree& tree);

}  // namespace aford
