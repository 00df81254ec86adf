#include "aford/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace aford {

MultiIndex::MultiIndex(int k1, int k2, int k3) : k{k1, k2, k3} {
  if (k1 < 0 || k2 < 0 || k3 < 0) throw std::invalid_argument("MultiIndex: negative exponent");
}

MultiIndex MultiIndex::sorted() const {
  MultiIndex out = *this;
  std::sort(out.k.begin(), out.k.end(), std::greater<>());
  return out;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(' << k[0] << ',' << k[1] << ',' << k[2] << ')';
  return os.str();
}

std::vector<MultiIndex> multi_indices_of_degree(int s) {
  std::vector<MultiIndex> out;
  for (int a = s; a >= 0; --a) {
    for (int b = s - a; b >= 0; --b) out.emplace_back(a, b, s - a - b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

MultiIndex shifted(MultiIndex k, int i, int di, int j = 0, int dj = 0) {
  k.k[static_cast<std::size_t>(i)] += di;
  k.k[static_cast<std::size_t>(j)] += dj;
  return k;
}

Rational fact(int n) { return Rational(factorial(static_cast<unsigned>(n))); }

constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {1, 2}, {2, 0}}};

}  // namespace

MomentTable::MomentTable(AlphaParam alpha) : alpha_(std::move(alpha)) {}

const Rational& MomentTable::operator()(const MultiIndex& k) { return compute(k.sorted()); }

const Rational& MomentTable::compute(const MultiIndex& k) {
  if (auto it = memo_.find(k); it != memo_.end()) return it->second;

  const int s = k.degree();
  const Rational& a = alpha_.value();
  Rational value;
  if (s == 0) {
    value = 1;
  } else if (s == 1) {
    // Exchangeability; also covers alpha = 1 where the normaliser vanishes.
    value = Rational(1, 3);
  } else {
    Rational acc = 0;
    for (int i = 0; i < 3; ++i) {
      const int ki = k[i];
      if (ki != 0) acc += Rational(ki + 1) * (ki - a) * (*this)(shifted(k, i, -1));
    }
    int empty_pairs = 0;
    for (const auto& [i, j] : kPairs) empty_pairs += (k[i] == 0 && k[j] == 0) ? 1 : 0;
    acc += (2 - 3 * a) * empty_pairs;
    Rational migration = 0;
    for (int i = 0; i < 3; ++i) {
      if (k[i] != 0) continue;
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        for (int p = 1; p <= k[j]; ++p) {
          migration += Rational(binomial(static_cast<unsigned>(k[j]), static_cast<unsigned>(p))) *
                       (*this)(shifted(k, i, p - 1, j, -p));
        }
      }
    }
    acc += a / 2 * migration;
    value = acc / (Rational(s + 3) * (s + 2 - 3 * a));
  }
  return memo_.emplace(k, std::move(value)).first->second;
}

Rational moment(const AlphaParam& alpha, const MultiIndex& k) {
  MomentTable table(alpha);
  return table(k);
}

Rational kingman_closed_form(const MultiIndex& k) {
  const int s = k.degree();
  Rational prod = 1;
  for (int i = 0; i < 3; ++i) prod *= fact(k[i] + 1);
  Rational pair_sum = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) pair_sum += fact(k[i] + k[j]) / fact(k[i] + k[j] + 3);
  }
  return 4 * prod / fact(s + 2) * pair_sum;
}

Rational kingman_univariate(int k) {
  if (k < 0) throw std::invalid_argument("kingman_univariate: k must be >= 0");
  const BigInt kk = k;
  const BigInt num = 2 * kk * (kk * (kk + 6) + 11) + 36;
  const BigInt den = 3 * (kk + 1) * (kk + 2) * (kk + 2) * (kk + 3);
  return Rational(num, den);
}

Rational kingman_beta_moment_unsymmetrised(const MultiIndex& k) {
  // E[B12^(k1+k2) (1-B12)^k3] E[B22^k1 (1-B22)^k2].
  const int s = k.degree();
  Rational prod = 1;
  for (int i = 0; i < 3; ++i) prod *= fact(k[i] + 1);
  return 12 * prod / fact(s + 2) * fact(k[0] + k[1]) / fact(k[0] + k[1] + 3);
}

Rational kingman_beta_moment(const MultiIndex& k) {
  std::array<int, 3> perm{0, 1, 2};
  Rational sum = 0;
  do {
    sum += kingman_beta_moment_unsymmetrised(MultiIndex(k[perm[0]], k[perm[1]], k[perm[2]]));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / 6;
}

Rational comb_moment(const MultiIndex& k) {
  // Each permutation places (x, 1-x, 0) on the coordinates; a coordinate
  // with a positive exponent on the zero slot kills the term.
  std::array<int, 3> perm{0, 1, 2};
  Rational sum = 0;
  do {
    int px = 0;
    int p1x = 0;
    bool zero = false;
    for (int i = 0; i < 3; ++i) {
      const int slot = perm[static_cast<std::size_t>(i)];
      if (slot == 0) px += k[i];
      if (slot == 1) p1x += k[i];
      if (slot == 2 && k[i] > 0) zero = true;
    }
    if (zero) continue;
    // Beta(2,2): E[x^a (1-x)^b] = B(2+a, 2+b) / B(2,2) = 6 (a+1)! (b+1)! / (a+b+3)!.
    sum += 6 * fact(px + 1) * fact(p1x + 1) / fact(px + p1x + 3);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / 6;
}

Rational crt_dirichlet_moment(const MultiIndex& k) {
  const Rational half(1, 2);
  Rational num = 1;
  for (int i = 0; i < 3; ++i) num *= rising_factorial(half, static_cast<unsigned>(k[i]));
  return num / rising_factorial(Rational(3, 2), static_cast<unsigned>(k.degree()));
}

Rational GeneratorExpansion::coefficient(const MultiIndex& k) const {
  auto it = terms.find(k);
  return it == terms.end() ? Rational(0) : it->second;
}

GeneratorExpansion monomial_generator_action(const AlphaParam& alpha, const MultiIndex& k) {
  const Rational& a = alpha.value();
  std::map<MultiIndex, Rational> terms;
  auto add = [&](const MultiIndex& idx, const Rational& c) { terms[idx] += c; };
  const MultiIndex zero(0, 0, 0);

  // Wright-Fisher: sum_{i,j} (k_i - delta_ij) k_j (delta_ij f^{k-e_i} - f^k).
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (k[i] == 0 || k[j] == 0) continue;
      const Rational c = Rational((k[i] - (i == j ? 1 : 0)) * k[j]);
      if (i == j) add(shifted(k, i, -1), c);
      add(k, -c);
    }
  }
  // Drift towards the barycentre: (2 - alpha) sum_i k_i (f^{k-e_i} - 3 f^k).
  for (int i = 0; i < 3; ++i) {
    if (k[i] == 0) continue;
    add(shifted(k, i, -1), (2 - a) * k[i]);
    add(k, -3 * (2 - a) * k[i]);
  }
  // Mass jumps to a corner: (2 - 3 alpha) (sum_{i<j} 1{k_i = k_j = 0} - 3 f^k).
  for (const auto& [i, j] : kPairs) {
    if (k[i] == 0 && k[j] == 0) add(zero, 2 - 3 * a);
  }
  add(k, -3 * (2 - 3 * a));
  // Migration into an empty coordinate.
  for (int i = 0; i < 3; ++i) {
    if (k[i] != 0) continue;
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      for (int p = 1; p <= k[j]; ++p) {
        add(shifted(k, i, p - 1, j, -p),
            a / 2 * Rational(binomial(static_cast<unsigned>(k[j]), static_cast<unsigned>(p))));
      }
    }
  }
  // Compensation: -alpha f^{k-e_i} for every occupied coordinate.
  for (int i = 0; i < 3; ++i) {
    if (k[i] != 0) add(shifted(k, i, -1), -a);
  }

  GeneratorExpansion out;
  for (auto& [idx, c] : terms) {
    if (c != 0) out.terms.emplace(idx, std::move(c));
  }
  return out;
}

Rational moment_from_generator(const AlphaParam& alpha, const MultiIndex& k) {
  std::map<MultiIndex, Rational> memo;
  std::function<Rational(const MultiIndex&)> solve = [&](const MultiIndex& idx) -> Rational {
    if (auto it = memo.find(idx); it != memo.end()) return it->second;
    Rational value;
    if (idx.degree() == 0) {
      value = 1;
    } else {
      const auto expansion = monomial_generator_action(alpha, idx);
      const Rational self = expansion.coefficient(idx);
      if (self == 0) {
        // Only degree 1 at alpha = 1; the coordinates are exchangeable.
        if (idx.degree() != 1) throw std::logic_error("moment_from_generator: singular equation");
        value = Rational(1, 3);
      } else {
        Rational rest = 0;
        for (const auto& [other, c] : expansion.terms) {
          if (other == idx) continue;
          if (other.degree() >= idx.degree()) {
            throw std::logic_error("moment_from_generator: expansion does not lower the degree");
          }
          rest += c * solve(other);
        }
        value = -rest / self;
      }
    }
    memo.emplace(idx, value);
    return value;
  };
  return solve(k);
}

std::vector<MomentEstimate> estimate_mass_moments(const FiniteMeasureTree& tree,
                                                  std::span<const MultiIndex> ks,
                                                  std::size_t triples, Rng& rng) {
  const int n = tree.leaf_count();
  if (n < 3) throw std::invalid_argument("estimate_mass_moments: need at least three leaves");
  std::vector<RunningStats> stats(ks.size());
  const double inv_n = 1.0 / n;
  for (std::size_t r = 0; r < triples; ++r) {
    std::array<int, 3> u{};
    u[0] = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    do {
      u[1] = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    } while (u[1] == u[0]);
    do {
      u[2] = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    } while (u[2] == u[0] || u[2] == u[1]);
    const auto counts = component_counts(tree, u);
    const std::array<double, 3> eta{counts[0] * inv_n, counts[1] * inv_n, counts[2] * inv_n};
    for (std::size_t q = 0; q < ks.size(); ++q) {
      double f = 1.0;
      for (int i = 0; i < 3; ++i) f *= std::pow(eta[static_cast<std::size_t>(i)], ks[q][i]);
      stats[q].add(f);
    }
  }
  std::vector<MomentEstimate> out;
  out.reserve(ks.size());
  for (std::size_t q = 0; q < ks.size(); ++q) {
    out.push_back({ks[q], stats[q].mean(), stats[q].standard_error(), stats[q].count()});
  }
  return out;
}

}  // namespace aford
