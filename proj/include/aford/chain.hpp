#pragma once

#include "aford/cladogram.hpp"
#include "aford/ford.hpp"
#include "aford/mutable_tree.hpp"
#include "aford/rational.hpp"
#include "aford/rng.hpp"
#include "aford/tree.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace aford {

enum class ChainKind { forward, backward };

/// Ordered state space C_m with a key -> index lookup.
class StateSpace {
 public:
  explicit StateSpace(int m);

  int leaves() const { return m_; }
  std::size_t size() const { return states_.size(); }
  const Cladogram& state(std::size_t i) const { return states_[i]; }
  const CanonicalKey& key(std::size_t i) const { return keys_[i]; }
  /// Throws std::out_of_range for a cladogram not in C_m.
  std::size_t index_of(const CanonicalKey& key) const;

 private:
  int m_;
  std::vector<Cladogram> states_;
  std::vector<CanonicalKey> keys_;
  std::map<CanonicalKey, std::size_t> index_;
};

/// Exact generator of the forward or backward alpha-Ford chain on C_m.
///
/// Off-diagonal rates are stored by row. Moves that reinsert a leaf where
/// it was removed are tracked as self_rate(); they count towards the total
/// clock rate but cancel in the generator, so diagonal(i) is minus the
/// off-diagonal row sum.
class RateMatrix {
 public:
  RateMatrix(ChainKind kind, AlphaParam alpha, StateSpace space);

  ChainKind kind() const { return kind_; }
  const AlphaParam& alpha() const { return alpha_; }
  const StateSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }

  /// Off-diagonal entry (i != j), or the generator diagonal when i == j.
  Rational rate(std::size_t i, std::size_t j) const;
  const std::map<std::size_t, Rational>& row(std::size_t i) const { return rows_[i]; }
  const Rational& self_rate(std::size_t i) const { return self_[i]; }
  Rational diagonal(std::size_t i) const;
  /// Off-diagonal outflow plus self-move rate.
  Rational total_rate(std::size_t i) const;

  Eigen::MatrixXd to_dense() const;

  void add_move(std::size_t from, std::size_t to, const Rational& rate);

 private:
  ChainKind kind_;
  AlphaParam alpha_;
  StateSpace space_;
  std::vector<std::map<std::size_t, Rational>> rows_;
  std::vector<Rational> self_;
};

inline constexpr int kMinChainLeaves = 4;
inline constexpr int kMaxChainLeaves = 7;

/// Rate (1 - alpha) per (leaf k, external edge of t minus k) and alpha per
/// (leaf k, internal edge of t minus k).
RateMatrix forward_rate_matrix(const AlphaParam& alpha, int m);

/// Rate (1 - alpha) per (cherry leaf k, any edge of t minus k) and alpha
/// per (non-cherry leaf k, any edge).
RateMatrix backward_rate_matrix(const AlphaParam& alpha, int m);

/// beta(t) = (1 - 2 alpha)(#cherries(t)(2m - 5) - m(m - 1)), indexed like
/// StateSpace(m).
struct Potential {
  StateSpace space;
  std::vector<Rational> values;
};

Potential beta_potential(const AlphaParam& alpha, int m);

struct ExactCheck {
  bool pass = false;
  Rational max_residual;
};

/// Backward total rate minus forward total rate equals beta at every state.
ExactCheck verify_beta_is_rate_discrepancy(const AlphaParam& alpha, int m);

/// q_backward(t', t) == q_forward(t, t') for every off-diagonal pair.
ExactCheck verify_reversal(const AlphaParam& alpha, int m);

/// pi Q for a row vector pi over the matrix's state order.
std::vector<Rational> left_multiply(std::span<const Rational> pi, const RateMatrix& q);

/// The alpha-Ford law as a vector over StateSpace(m) order.
std::vector<Rational> stationary_vector(const AlphaParam& alpha, const StateSpace& space);

/// Max over t' of | sum_t P(t) q_raw(t, t') - m(m-1-3 alpha) P(t') |, with
/// q_raw including self-moves and P the exact alpha-Ford law.
Rational verify_invariance(const AlphaParam& alpha, int m);

/// max |exp(t Q_fwd) - exp(t (Q_bwd + diag beta))^T|. m = 7 (945 states)
/// needs allow_large.
double verify_feynman_kac(const AlphaParam& alpha, int m, double t, bool allow_large = false);

/// Event-driven alpha-Ford chain on N-leaf trees.
///
/// Each event picks a uniform leaf k, cuts it out, then reinserts it at an
/// external edge of the remaining tree with probability
/// (1-alpha)(N-1) / ((1-alpha)(N-1) + alpha(N-4)) and at an internal edge
/// otherwise, uniformly within the class. Events arrive at rate
/// N((1-alpha)(N-1) + alpha(N-4)); reinsertion at the cut point is a
/// no-op that still counts as an event.
class ChainState {
 public:
  ChainState(const Cladogram& initial, AlphaParam alpha, Rng rng);

  double time() const { return time_; }
  int leaf_count() const { return tree_.leaf_count(); }
  const AlphaParam& alpha() const { return alpha_; }
  double total_rate() const { return total_rate_; }
  std::uint64_t jumps() const { return jumps_; }
  std::uint64_t self_moves() const { return self_moves_; }

  /// Executes one move without advancing time.
  void move();

  /// Advances time to the next event; returns false (and stops at
  /// `horizon`) if that event would fall after it.
  bool step(double horizon);

  /// Moves the clock forward to `t` (>= time()) without an event.
  void advance_to(double t);

  const MutableTree& tree() const { return tree_; }
  Cladogram snapshot() const { return tree_.to_cladogram(); }
  FiniteMeasureTree measure_tree() const { return FiniteMeasureTree(snapshot()); }
  Rng& rng() { return rng_; }

 private:
  MutableTree tree_;
  AlphaParam alpha_;
  Rng rng_;
  double time_ = 0.0;
  double external_probability_ = 1.0;
  double total_rate_ = 0.0;
  std::uint64_t jumps_ = 0;
  std::uint64_t self_moves_ = 0;
};

struct SimulationSummary {
  std::uint64_t jumps = 0;
  std::uint64_t self_moves = 0;
  double final_time = 0.0;
};

using ChainObserver = std::function<void(double time, const ChainState& state)>;

/// Runs until `horizon`, calling `observer` at each of the sorted
/// `observation_times` (<= horizon) with the state at that time. With
/// audit_every > 0 the tree is audited every audit_every moves.
SimulationSummary simulate_chain(ChainState& state, double horizon,
                                 std::span<const double> observation_times = {},
                                 const ChainObserver& observer = {},
                                 std::uint64_t audit_every = 0);

struct ShapeEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo of the shape polynomial mu^m(shape = target): i.i.d. leaf
/// m-tuples with replacement, tuples with a repeated leaf score 0.
ShapeEstimate estimate_shape_polynomial(const FiniteMeasureTree& tree, const Cladogram& target,
                                        std::size_t samples, Rng& rng);

/// All shape polynomials of order m at once, ordered like StateSpace(m).
std::vector<ShapeEstimate> estimate_shape_polynomials(const FiniteMeasureTree& tree,
                                                      const StateSpace& space,
                                                      std::size_t samples, Rng& rng);

/// Exact shape polynomials, ordered like StateSpace(m). For m <= 4 every
/// distinct m-subset of a binary tree resolves and, by exchangeability of
/// the sample order, each labelled shape gets an equal share, so the value
/// is (N)_m / (|C_m| N^m). Larger m enumerates all N^m tuples and throws
/// ResourceGuardError if N^m > max_tuples.
std::vector<Rational> exact_shape_polynomials(const FiniteMeasureTree& tree, const StateSpace& space,
                                              std::uint64_t max_tuples = 20'000'000);

struct DualityTarget {
  CanonicalKey target;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  double z = 0.0;
};

struct DualityOptions {
  std::size_t replicates = 10'000;
  std::size_t tuples_per_replicate = 8;
  /// Tuples for the right-hand side when exact shape polynomials are not
  /// available (m = 5).
  std::size_t rhs_tuples = 200'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct DualityResult {
  std::vector<DualityTarget> targets;
  double max_abs_z = 0.0;
  bool rhs_exact = false;
};

/// Compares E_chi[Phi^{m,t}(X_time)] from simulated chains started at
/// `initial` with the tilted backward semigroup applied to the shape
/// polynomials of `initial`: (exp(time (Q_bwd + diag beta)) Phi(chi))_t.
DualityResult verify_chain_diffusion_duality(const AlphaParam& alpha, int m,
                                             const FiniteMeasureTree& initial, double time,
                                             const DualityOptions& options);

}  // namespace aford
