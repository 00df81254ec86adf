#pragma once

#include "aford/ford.hpp"
#include "aford/rational.hpp"
#include "aford/rng.hpp"
#include "aford/stats.hpp"
#include "aford/tree.hpp"

#include <array>
#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace aford {

/// Exponent vector (k1, k2, k3) of the mass monomial eta1^k1 eta2^k2 eta3^k3.
struct MultiIndex {
  std::array<int, 3> k{0, 0, 0};

  MultiIndex() = default;
  MultiIndex(int k1, int k2, int k3);

  int degree() const { return k[0] + k[1] + k[2]; }
  int operator[](int i) const { return k[static_cast<std::size_t>(i)]; }
  /// Components sorted in decreasing order.
  MultiIndex sorted() const;
  std::string to_string() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All multi-indices of total degree exactly s, in lexicographic order.
std::vector<MultiIndex> multi_indices_of_degree(int s);

/// Stationary moments E[f^k(X)] of the subtree mass vector for one alpha.
///
/// Computed top-down from the generator recursion; every term on the right
/// has degree S - 1 or is a constant, so the recursion ends at (0,0,0).
/// Entries are memoised on the sorted index since the law is exchangeable.
/// Not thread-safe while filling; share only after the entries you need
/// have been computed.
class MomentTable {
 public:
  explicit MomentTable(AlphaParam alpha);

  const AlphaParam& alpha() const { return alpha_; }
  const Rational& operator()(const MultiIndex& k);
  std::size_t cached_entries() const { return memo_.size(); }

 private:
  const Rational& compute(const MultiIndex& sorted);

  AlphaParam alpha_;
  std::map<MultiIndex, Rational> memo_;
};

/// One-shot convenience wrapper around MomentTable.
Rational moment(const AlphaParam& alpha, const MultiIndex& k);

/// alpha = 0 closed form:
///   4 prod Gamma(k_j+2) / Gamma(S+3) * sum_{i<j} Gamma(k_i+k_j+1) / Gamma(k_i+k_j+4).
Rational kingman_closed_form(const MultiIndex& k);

/// alpha = 0, one coordinate: (2k(k(k+6)+11)+36) / (3(k+1)(k+2)^2(k+3)).
Rational kingman_univariate(int k);

/// Symmetrised moments of (B12 B22, B12 (1 - B22), 1 - B12) with
/// B12 ~ Beta(1,2), B22 ~ Beta(2,2) independent.
Rational kingman_beta_moment(const MultiIndex& k);

/// Unsymmetrised moment of the same vector.
Rational kingman_beta_moment_unsymmetrised(const MultiIndex& k);

/// Comb law: (1/6) sum over permutations of (x, 1-x, 0), x ~ Beta(2,2).
Rational comb_moment(const MultiIndex& k);

/// Dirichlet(1/2, 1/2, 1/2) moment: prod (1/2)_{k_i} / (3/2)_S.
Rational crt_dirichlet_moment(const MultiIndex& k);

/// Generator applied to the mass monomial f^k, written as a linear
/// combination of monomials (the constant function is (0,0,0)).
struct GeneratorExpansion {
  std::map<MultiIndex, Rational> terms;

  Rational coefficient(const MultiIndex& k) const;
  bool is_zero() const { return terms.empty(); }
};

/// Expansion of the generator on f^k: Wright-Fisher, drift, constant-mass,
/// migration and compensation terms, with like monomials merged and zero
/// coefficients dropped.
GeneratorExpansion monomial_generator_action(const AlphaParam& alpha, const MultiIndex& k);

/// Solves E[generator f^k] = 0 for E[f^k], degree by degree, using only
/// monomial_generator_action. Shares no code with MomentTable, so the two
/// can be checked against each other.
Rational moment_from_generator(const AlphaParam& alpha, const MultiIndex& k);

struct MomentEstimate {
  MultiIndex k;
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo of E[f^k(eta(U))] over uniformly drawn distinct leaf triples.
std::vector<MomentEstimate> estimate_mass_moments(const FiniteMeasureTree& tree,
                                                  std::span<const MultiIndex> ks,
                                                  std::size_t triples, Rng& rng);

}  // namespace aford
