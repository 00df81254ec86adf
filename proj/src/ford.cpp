#include "aford/ford.hpp"

#include "aford/mutable_tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aford {

AlphaParam::AlphaParam(Rational value) : value_(std::move(value)) {
  if (value_ < 0 || value_ > 1) {
    throw std::invalid_argument("alpha must lie in [0, 1], got " + aford::to_string(value_));
  }
  as_double_ = to_double(value_);
}

AlphaParam AlphaParam::parse(std::string_view text) { return AlphaParam(parse_rational(text)); }

std::string AlphaParam::to_string() const { return aford::to_string(value_); }

Rational ExactDistribution::probability(const CanonicalKey& key) const {
  auto it = table.find(key);
  return it == table.end() ? Rational(0) : it->second;
}

Rational ExactDistribution::total() const {
  Rational s = 0;
  for (const auto& [key, p] : table) s += p;
  return s;
}

namespace {

void grow_ford(MutableTree& tree, int target, double alpha, Rng& rng) {
  while (tree.leaf_count() < target) {
    const int leaves = tree.leaf_count();
    const double w_ext = (1.0 - alpha) * leaves;
    const double w_int = alpha * static_cast<double>(tree.internal_edge_count());
    const double total = w_ext + w_int;
    bool external = true;
    if (total > 0.0) external = rng.uniform01() * total < w_ext;
    if (external) {
      tree.grow(tree.external_edge(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(leaves)))));
    } else {
      tree.grow(tree.internal_edge(rng.uniform_index(tree.internal_edge_count())));
    }
  }
}

}  // namespace

Cladogram sample_ford_cladogram(const AlphaParam& alpha, int m, Rng& rng) {
  if (m < 2) throw std::invalid_argument("sample_ford_cladogram: m must be >= 2");
  MutableTree tree(m);
  grow_ford(tree, m, alpha.as_double(), rng);
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  return relabel(tree.to_cladogram(), perm);
}

FiniteMeasureTree sample_ford_tree(const AlphaParam& alpha, int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_ford_tree: N must be >= 2");
  MutableTree tree(n);
  grow_ford(tree, n, alpha.as_double(), rng);
  return FiniteMeasureTree(tree.to_cladogram());
}

Cladogram sample_kingman_cladogram(int m, Rng& rng) {
  if (m < 2) throw std::invalid_argument("sample_kingman_cladogram: m must be >= 2");
  std::vector<int> labels(static_cast<std::size_t>(m));
  std::iota(labels.begin(), labels.end(), 1);
  std::vector<int> blocks(static_cast<std::size_t>(m));
  std::iota(blocks.begin(), blocks.end(), 0);
  std::vector<Edge> edges;
  while (blocks.size() > 2) {
    const std::size_t k = blocks.size();
    std::size_t i = rng.uniform_index(k);
    std::size_t j = rng.uniform_index(k - 1);
    if (j >= i) ++j;
    const int merged = static_cast<int>(labels.size());
    labels.push_back(0);
    edges.push_back({merged, blocks[i]});
    edges.push_back({merged, blocks[j]});
    if (i < j) std::swap(i, j);
    blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i));
    blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(j));
    blocks.push_back(merged);
  }
  edges.push_back({blocks[0], blocks[1]});
  return Cladogram::from_labelled_edges(labels, edges);
}

FiniteMeasureTree build_comb_tree(int n) {
  if (n < 2) throw std::invalid_argument("build_comb_tree: N must be >= 2");
  if (n == 2) return FiniteMeasureTree(Cladogram{});
  // Leaves 0..n-1 (comb positions 1..n), spine vertices n..2n-3.
  std::vector<int> labels(static_cast<std::size_t>(2 * n - 2), 0);
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i + 1;
  std::vector<Edge> edges;
  const int spine = n - 2;
  for (int s = 0; s < spine; ++s) {
    const int v = n + s;
    edges.push_back({v, s + 1});
    if (s + 1 < spine) edges.push_back({v, v + 1});
  }
  edges.push_back({0, n});
  edges.push_back({n - 1, n + spine - 1});
  return FiniteMeasureTree(Cladogram::from_labelled_edges(labels, edges));
}

ExactDistribution exact_distribution(const AlphaParam& alpha, int m, int m_max) {
  if (m < 2) throw std::invalid_argument("exact_distribution: m must be >= 2");
  if (m > m_max) {
    throw ResourceGuardError("exact_distribution: m = " + std::to_string(m) + " exceeds the limit " +
                             std::to_string(m_max));
  }
  const Rational& a = alpha.value();
  ExactDistribution dist;
  dist.m = std::min(m, 4);
  {
    const auto base = enumerate_cladograms(dist.m, m_max);
    const Rational p(1, static_cast<long>(base.size()));
    for (const auto& t : base) dist.table.emplace(canonical_key(t), p);
  }
  for (int level = 5; level <= m; ++level) {
    ExactDistribution next;
    next.m = level;
    const Rational norm = Rational(level) * (Rational(level - 1) - 3 * a);
    for (const auto& t : enumerate_cladograms(level, m_max)) {
      Rational acc = 0;
      for (int k = 1; k <= level; ++k) {
        const Rational w = is_cherry(t, k) ? Rational(1 - a) : a;
        if (w == 0) continue;
        acc += dist.probability(canonical_key(delete_leaf(t, k))) * w;
      }
      next.table.emplace(canonical_key(t), acc / norm);
    }
    dist = std::move(next);
  }
  return dist;
}

ExactDistribution marginalize_by_deletion(const ExactDistribution& dist) {
  if (dist.m < 3) throw std::invalid_argument("marginalize_by_deletion: m must be >= 3");
  ExactDistribution out;
  out.m = dist.m - 1;
  const Rational share(1, dist.m);
  for (const auto& t : enumerate_cladograms(dist.m, std::max(dist.m, kDefaultMaxEnumerationLeaves))) {
    const Rational p = dist.probability(canonical_key(t));
    if (p == 0) continue;
    for (int k = 1; k <= dist.m; ++k) out.table[canonical_key(delete_leaf(t, k))] += p * share;
  }
  return out;
}

DeletionStability deletion_stability_check(const AlphaParam& alpha, int m) {
  if (m < 3 || m > kDefaultMaxEnumerationLeaves) {
    throw ResourceGuardError("deletion_stability_check: m must lie in 3..8");
  }
  const auto marginal = marginalize_by_deletion(exact_distribution(alpha, m));
  const auto reference = exact_distribution(alpha, m - 1);
  DeletionStability result;
  result.max_residual = 0;
  for (const auto& t : enumerate_cladograms(m - 1)) {
    const auto key = canonical_key(t);
    Rational d = marginal.probability(key) - reference.probability(key);
    if (d < 0) d = -d;
    result.max_residual = std::max(result.max_residual, d);
  }
  for (const auto& [key, p] : marginal.table) {
    if (!reference.table.contains(key)) result.max_residual = std::max(result.max_residual, p);
  }
  result.pass = result.max_residual == 0;
  return result;
}

}  // namespace aford
