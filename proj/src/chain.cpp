#include "aford/chain.hpp"

#include "aford/matrix_exp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aford {

StateSpace::StateSpace(int m) : m_(m), states_(enumerate_cladograms(m)) {
  keys_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    keys_.push_back(canonical_key(states_[i]));
    index_.emplace(keys_.back(), i);
  }
}

std::size_t StateSpace::index_of(const CanonicalKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw std::out_of_range("StateSpace: unknown cladogram " + key.to_string());
  return it->second;
}

RateMatrix::RateMatrix(ChainKind kind, AlphaParam alpha, StateSpace space)
    : kind_(kind), alpha_(std::move(alpha)), space_(std::move(space)), rows_(space_.size()),
      self_(space_.size(), Rational(0)) {}

void RateMatrix::add_move(std::size_t from, std::size_t to, const Rational& rate) {
  if (rate == 0) return;
  if (from == to) {
    self_[from] += rate;
  } else {
    rows_[from][to] += rate;
  }
}

Rational RateMatrix::rate(std::size_t i, std::size_t j) const {
  if (i == j) return diagonal(i);
  auto it = rows_[i].find(j);
  return it == rows_[i].end() ? Rational(0) : it->second;
}

Rational RateMatrix::diagonal(std::size_t i) const {
  Rational s = 0;
  for (const auto& [j, r] : rows_[i]) s += r;
  return -s;
}

Rational RateMatrix::total_rate(std::size_t i) const { return self_[i] - diagonal(i); }

Eigen::MatrixXd RateMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < size(); ++i) {
    double out = 0.0;
    for (const auto& [j, r] : rows_[i]) {
      const double v = to_double(r);
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      out += v;
    }
    q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -out;
  }
  return q;
}

namespace {

void check_chain_size(int m) {
  if (m < kMinChainLeaves || m > kMaxChainLeaves) {
    throw ResourceGuardError("rate matrices are built for " + std::to_string(kMinChainLeaves) +
                             " <= m <= " + std::to_string(kMaxChainLeaves) + ", got m = " +
                             std::to_string(m));
  }
}

RateMatrix build_rate_matrix(ChainKind kind, const AlphaParam& alpha, int m) {
  check_chain_size(m);
  RateMatrix q(kind, alpha, StateSpace(m));
  const Rational& a = alpha.value();
  const Rational ext_weight = 1 - a;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Cladogram& t = q.space().state(i);
    for (int k = 1; k <= m; ++k) {
      const Cladogram reduced = delete_leaf(t, k);
      const Rational leaf_weight = is_cherry(t, k) ? ext_weight : a;
      for (const Edge& e : reduced.edges()) {
        const Rational w = kind == ChainKind::forward ? (is_external(reduced, e) ? ext_weight : a)
                                                      : leaf_weight;
        if (w == 0) continue;
        const std::size_t j = q.space().index_of(canonical_key(insert_leaf(reduced, e, k)));
        q.add_move(i, j, w);
      }
    }
  }
  return q;
}

Rational abs_value(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace

RateMatrix forward_rate_matrix(const AlphaParam& alpha, int m) {
  return build_rate_matrix(ChainKind::forward, alpha, m);
}

RateMatrix backward_rate_matrix(const AlphaParam& alpha, int m) {
  return build_rate_matrix(ChainKind::backward, alpha, m);
}

Potential beta_potential(const AlphaParam& alpha, int m) {
  check_chain_size(m);
  Potential out{StateSpace(m), {}};
  const Rational factor = 1 - 2 * alpha.value();
  out.values.reserve(out.space.size());
  for (std::size_t i = 0; i < out.space.size(); ++i) {
    const auto ch = static_cast<long>(cherries(out.space.state(i)).size());
    out.values.push_back(factor * (ch * (2 * m - 5) - m * (m - 1)));
  }
  return out;
}

ExactCheck verify_beta_is_rate_discrepancy(const AlphaParam& alpha, int m) {
  const auto fwd = forward_rate_matrix(alpha, m);
  const auto bwd = backward_rate_matrix(alpha, m);
  const auto beta = beta_potential(alpha, m);
  ExactCheck out;
  out.max_residual = 0;
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    const Rational d = bwd.total_rate(i) - fwd.total_rate(i) - beta.values[i];
    out.max_residual = std::max(out.max_residual, abs_value(d));
  }
  out.pass = out.max_residual == 0;
  return out;
}

ExactCheck verify_reversal(const AlphaParam& alpha, int m) {
  const auto fwd = forward_rate_matrix(alpha, m);
  const auto bwd = backward_rate_matrix(alpha, m);
  ExactCheck out;
  out.max_residual = 0;
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    for (const auto& [j, r] : fwd.row(i)) {
      out.max_residual = std::max(out.max_residual, abs_value(bwd.rate(j, i) - r));
    }
    for (const auto& [j, r] : bwd.row(i)) {
      out.max_residual = std::max(out.max_residual, abs_value(fwd.rate(j, i) - r));
    }
  }
  out.pass = out.max_residual == 0;
  return out;
}

std::vector<Rational> left_multiply(std::span<const Rational> pi, const RateMatrix& q) {
  if (pi.size() != q.size()) throw std::invalid_argument("left_multiply: size mismatch");
  std::vector<Rational> out(q.size(), Rational(0));
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (pi[i] == 0) continue;
    out[i] += pi[i] * q.diagonal(i);
    for (const auto& [j, r] : q.row(i)) out[j] += pi[i] * r;
  }
  return out;
}

std::vector<Rational> stationary_vector(const AlphaParam& alpha, const StateSpace& space) {
  const auto dist = exact_distribution(alpha, space.leaves());
  std::vector<Rational> pi;
  pi.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) pi.push_back(dist.probability(space.key(i)));
  return pi;
}

Rational verify_invariance(const AlphaParam& alpha, int m) {
  const auto q = forward_rate_matrix(alpha, m);
  const auto pi = stationary_vector(alpha, q.space());
  std::vector<Rational> inflow(q.size(), Rational(0));
  for (std::size_t i = 0; i < q.size(); ++i) {
    inflow[i] += pi[i] * q.self_rate(i);
    for (const auto& [j, r] : q.row(i)) inflow[j] += pi[i] * r;
  }
  const Rational clock = Rational(m) * (Rational(m - 1) - 3 * alpha.value());
  Rational worst = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    worst = std::max(worst, abs_value(inflow[j] - clock * pi[j]));
  }
  return worst;
}

double verify_feynman_kac(const AlphaParam& alpha, int m, double t, bool allow_large) {
  if (m > 6 && !allow_large) {
    throw ResourceGuardError("verify_feynman_kac: m = 7 needs the allow_large opt-in");
  }
  const Eigen::MatrixXd fwd = forward_rate_matrix(alpha, m).to_dense();
  Eigen::MatrixXd tilted = backward_rate_matrix(alpha, m).to_dense();
  const auto beta = beta_potential(alpha, m);
  for (std::size_t i = 0; i < beta.values.size(); ++i) {
    tilted(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += to_double(beta.values[i]);
  }
  const Eigen::MatrixXd lhs = matrix_exponential(fwd, t);
  const Eigen::MatrixXd rhs = matrix_exponential(tilted, t).transpose();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace aford
