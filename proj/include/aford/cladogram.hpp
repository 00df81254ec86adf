#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aford {

class FiniteMeasureTree;

/// Thrown when a tree violates the binary cladogram invariants or an
/// operation refers to an edge, vertex or label that does not exist.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a request exceeds a size limit (enumeration, dense matrices).
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected edge between two vertex ids.
struct Edge {
  int u = -1;
  int v = -1;

  friend bool operator==(const Edge& a, const Edge& b) {
    return (a.u == b.u && a.v == b.v) || (a.u == b.v && a.v == b.u);
  }
};

/// Identity of a labelled cladogram: the set of internal-edge splits, each
/// given as the sorted labels on the side not containing label 1. Two
/// cladograms are isomorphic as labelled trees iff their keys compare equal.
struct CanonicalKey {
  int leaves = 0;
  std::vector<std::vector<int>> splits;

  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;

  /// e.g. "5:{2,3}{2,3,4}"; "3:" for the unique 3-cladogram.
  std::string to_string() const;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& key) const;
};

/// Leaf-labelled unrooted binary tree on labels 1..m.
///
/// Layout: vertex v < m is the leaf with label v + 1; vertices m .. 2m-3 are
/// internal and have degree 3. Internal ids carry no meaning; identity goes
/// through canonical_key(). Values are immutable once built.
class Cladogram {
 public:
  /// The 2-cladogram: leaves 1 and 2 joined by an edge.
  Cladogram();

  /// Builds a cladogram from an arbitrary vertex numbering. `labels[v]` is
  /// the leaf label of vertex v (1..m) or 0 for an internal vertex. Throws
  /// StructuralError if the result is not a binary tree with labels 1..m.
  static Cladogram from_labelled_edges(std::span<const int> labels, std::span<const Edge> edges);

  int leaf_count() const { return m_; }
  int vertex_count() const { return static_cast<int>(adj_.size()); }
  int internal_count() const { return vertex_count() - m_; }
  int edge_count() const { return 2 * m_ - 3; }

  bool is_leaf(int v) const { return v < m_; }
  int leaf_vertex(int label) const;
  int label_of(int v) const { return is_leaf(v) ? v + 1 : 0; }

  const std::vector<int>& neighbors(int v) const { return adj_.at(static_cast<std::size_t>(v)); }
  bool has_edge(const Edge& e) const;

  /// All edges, each once, ordered by (min endpoint, max endpoint).
  std::vector<Edge> edges() const;

  /// Full invariant audit; throws StructuralError.
  void validate() const;

 private:
  int m_ = 2;
  std::vector<std::vector<int>> adj_;

  friend Cladogram insert_leaf(const Cladogram&, const Edge&, int);
  friend Cladogram delete_leaf(const Cladogram&, int);
  friend Cladogram relabel(const Cladogram&, std::span<const int>);
};

/// Subdivides `e` with a new internal vertex and hangs a new leaf there. The
/// new leaf gets `new_label` (1..m+1); existing labels >= new_label move up
/// by one. Throws StructuralError for an edge not in `t` or a bad label.
Cladogram insert_leaf(const Cladogram& t, const Edge& e, int new_label);

/// Removes leaf `label`, suppresses its degree-2 neighbour and shifts labels
/// above `label` down by one. Requires m >= 3.
Cladogram delete_leaf(const Cladogram& t, int label);

/// Applies a label permutation: old label l becomes permutation[l - 1].
Cladogram relabel(const Cladogram& t, std::span<const int> permutation);

/// Labels of the leaves whose internal neighbour carries two leaves. For
/// m <= 3 every leaf counts as a cherry.
std::vector<int> cherries(const Cladogram& t);
bool is_cherry(const Cladogram& t, int label);

struct EdgeClasses {
  std::vector<Edge> external;
  std::vector<Edge> internal;
};

EdgeClasses classify_edges(const Cladogram& t);
bool is_external(const Cladogram& t, const Edge& e);

CanonicalKey canonical_key(const Cladogram& t);

inline bool same_cladogram(const Cladogram& a, const Cladogram& b) {
  return canonical_key(a) == canonical_key(b);
}

inline constexpr int kDefaultMaxEnumerationLeaves = 8;

/// All (2m-5)!! labelled m-cladogram shapes, sorted by canonical key.
/// Throws ResourceGuardError if m > m_max, std::invalid_argument if m < 2.
std::vector<Cladogram> enumerate_cladograms(int m, int m_max = kDefaultMaxEnumerationLeaves);

/// Number of m-cladograms, (2m-5)!! (1 for m <= 3).
std::uint64_t cladogram_count(int m);

/// Shape spanned by the pairwise distinct leaves `u` of `tree`: leaf i of the
/// result corresponds to u[i-1]. Throws std::invalid_argument on duplicates
/// or non-leaf vertices.
Cladogram shape(const FiniteMeasureTree& tree, std::span<const int> u);

/// A cladogram with a surjective, possibly non-injective map from sample
/// positions 1..m onto its leaves. Produced by sampling with replacement.
struct LabelledCladogram {
  Cladogram tree;
  /// sample_to_leaf[i] is the leaf label (in `tree`) that sample i+1 maps to.
  std::vector<int> sample_to_leaf;

  bool injective() const;
};

/// Shape of a sample that may contain repeated leaves: the distinct leaves
/// are labelled by first occurrence and repeats map onto the same leaf.
/// Requires at least two distinct leaves.
LabelledCladogram labelled_shape(const FiniteMeasureTree& tree, std::span<const int> u);

}  // namespace aford
