#pragma once

#include "aford/cladogram.hpp"
#include "aford/rational.hpp"
#include "aford/rng.hpp"
#include "aford/tree.hpp"

#include <map>
#include <string_view>
#include <vector>

namespace aford {

/// Insertion parameter in [0, 1]: external edges weigh 1 - alpha, internal
/// edges alpha. 0 is the Yule/Kingman tree, 1/2 the uniform tree, 1 the comb.
class AlphaParam {
 public:
  explicit AlphaParam(Rational value);
  /// Accepts "p/q" or a decimal; throws std::invalid_argument outside [0,1].
  static AlphaParam parse(std::string_view text);

  const Rational& value() const { return value_; }
  double as_double() const { return as_double_; }
  std::string to_string() const;

 private:
  Rational value_;
  double as_double_;
};

/// Exact law on m-cladograms, keyed by canonical key.
struct ExactDistribution {
  int m = 0;
  std::map<CanonicalKey, Rational> table;

  /// 0 for keys outside the table.
  Rational probability(const CanonicalKey& key) const;
  Rational total() const;
};

/// Grows an m-cladogram by weighted edge insertion and then permutes the
/// labels uniformly. When every edge has weight 0 (alpha = 1 with at most
/// three leaves) the new leaf goes to a uniformly chosen external edge.
Cladogram sample_ford_cladogram(const AlphaParam& alpha, int m, Rng& rng);

/// Same growth without the label permutation, with uniform leaf mass.
FiniteMeasureTree sample_ford_tree(const AlphaParam& alpha, int n, Rng& rng);

/// Builds an m-cladogram from the Kingman m-coalescent jump chain: each
/// merge of two blocks creates a vertex joined to both block vertices, and
/// the last merge joins the final two block vertices directly.
Cladogram sample_kingman_cladogram(int m, Rng& rng);

/// Spine of n-2 internal vertices, each with one tooth, plus one leaf at
/// each end of the spine. Leaf labels follow comb positions.
FiniteMeasureTree build_comb_tree(int n);

/// P(X^m = t) for the alpha-Ford model, via
///   P_m(t) = (1/m) sum_k P_{m-1}(t minus k) w_k / (m - 1 - 3 alpha),
/// w_k = 1 - alpha for cherry leaves and alpha otherwise. m <= 3 is a point
/// mass and m = 4 is uniform for every alpha.
ExactDistribution exact_distribution(const AlphaParam& alpha, int m,
                                     int m_max = kDefaultMaxEnumerationLeaves);

/// Law of the (m-1)-cladogram obtained by deleting a uniform random leaf.
ExactDistribution marginalize_by_deletion(const ExactDistribution& dist);

struct DeletionStability {
  bool pass = false;
  Rational max_residual;
};

/// Compares marginalize_by_deletion(exact(m)) with exact(m-1) exactly.
DeletionStability deletion_stability_check(const AlphaParam& alpha, int m);

}  // namespace aford
