#pragma once

// Brute-force reference implementations. They share no code paths with the
// library beyond the Cladogram container itself.

#include "aford/cladogram.hpp"
#include "aford/ford.hpp"
#include "aford/newick.hpp"
#include "aford/rational.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using aford::Cladogram;
using aford::Rational;

inline std::vector<std::vector<int>> all_distances(const Cladogram& t) {
  const int n = t.vertex_count();
  std::vector<std::vector<int>> d(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int s = 0; s < n; ++s) {
    auto& row = d[static_cast<std::size_t>(s)];
    std::queue<int> q;
    q.push(s);
    row[static_cast<std::size_t>(s)] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int w : t.neighbors(v)) {
        if (row[static_cast<std::size_t>(w)] < 0) {
          row[static_cast<std::size_t>(w)] = row[static_cast<std::size_t>(v)] + 1;
          q.push(w);
        }
      }
    }
  }
  return d;
}

inline int at(const std::vector<std::vector<int>>& d, int a, int b) {
  return d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

/// The vertex minimising the summed distance to x, y, z.
inline int median(const std::vector<std::vector<int>>& d, int x, int y, int z) {
  int best = -1;
  int best_sum = 1 << 30;
  for (int v = 0; v < static_cast<int>(d.size()); ++v) {
    const int s = at(d, x, v) + at(d, y, v) + at(d, z, v);
    if (s < best_sum) {
      best_sum = s;
      best = v;
    }
  }
  return best;
}

/// Law of the median of three i.i.d. uniform leaves, by summing all N^3
/// ordered triples.
inline std::vector<Rational> nu(const Cladogram& t) {
  const auto d = all_distances(t);
  const int n = t.leaf_count();
  std::vector<long> count(static_cast<std::size_t>(t.vertex_count()), 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) ++count[static_cast<std::size_t>(median(d, a, b, c))];
  std::vector<Rational> out;
  const long total = static_cast<long>(n) * n * n;
  for (long c : count) out.emplace_back(c, total);
  return out;
}

inline Rational r_mu(const Cladogram& t, int x, int y) {
  const auto d = all_distances(t);
  const auto law = nu(t);
  Rational s = 0;
  for (int z = 0; z < t.vertex_count(); ++z) {
    if (at(d, x, z) + at(d, z, y) == at(d, x, y)) s += law[static_cast<std::size_t>(z)];
  }
  return s - law[static_cast<std::size_t>(x)] / 2 - law[static_cast<std::size_t>(y)] / 2;
}

/// Key of the cladogram spanned by distinct leaves u (sample i -> label i+1),
/// read off from the bipartitions that the edges of t induce on u.
inline aford::CanonicalKey shape_key(const Cladogram& t, const std::vector<int>& u) {
  const int m = static_cast<int>(u.size());
  std::set<std::vector<int>> splits;
  for (const auto& e : t.edges()) {
    // Vertices on the v side of e.
    std::vector<char> side(static_cast<std::size_t>(t.vertex_count()), 0);
    std::vector<int> stack{e.v};
    side[static_cast<std::size_t>(e.v)] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int w : t.neighbors(x)) {
        if (side[static_cast<std::size_t>(w)] || (x == e.v && w == e.u)) continue;
        side[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
    std::vector<int> a;
    std::vector<int> b;
    for (int i = 0; i < m; ++i) (side[static_cast<std::size_t>(u[static_cast<std::size_t>(i)])] ? a : b).push_back(i + 1);
    if (a.size() < 2 || b.size() < 2) continue;
    const auto& away = std::find(a.begin(), a.end(), 1) == a.end() ? a : b;
    splits.insert(away);
  }
  return {m, std::vector<std::vector<int>>(splits.begin(), splits.end())};
}

/// Exact alpha-Ford law by summing over every growth path and every label
/// permutation.
inline std::map<aford::CanonicalKey, Rational> ford_law_by_paths(const Rational& alpha, int m) {
  std::map<aford::CanonicalKey, Rational> grown;
  auto rec = [&](auto&& self, const Cladogram& t, const Rational& p) -> void {
    if (t.leaf_count() == m) {
      grown[aford::canonical_key(t)] += p;
      return;
    }
    const auto edges = t.edges();
    Rational total = 0;
    std::vector<Rational> w;
    for (const auto& e : edges) {
      w.push_back(aford::is_external(t, e) ? 1 - alpha : alpha);
      total += w.back();
    }
    if (total == 0) {
      for (std::size_t i = 0; i < edges.size(); ++i) w[i] = aford::is_external(t, edges[i]) ? 1 : 0;
      total = std::accumulate(w.begin(), w.end(), Rational(0));
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (w[i] == 0) continue;
      self(self, aford::insert_leaf(t, edges[i], t.leaf_count() + 1), p * w[i] / total);
    }
  };
  rec(rec, Cladogram{}, Rational(1));

  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 1);
  long perms = 0;
  std::map<aford::CanonicalKey, Rational> out;
  std::map<aford::CanonicalKey, Cladogram> trees;
  for (const auto& [key, p] : grown) {
    (void)p;
    for (const auto& t : aford::enumerate_cladograms(m)) {
      if (aford::canonical_key(t) == key) trees.emplace(key, t);
    }
  }
  do {
    ++perms;
    for (const auto& [key, p] : grown) {
      out[aford::canonical_key(aford::relabel(trees.at(key), perm))] += p;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& [key, p] : out) p /= perms;
  return out;
}

/// Law of the cladogram built from a Kingman coalescent, by enumerating every
/// merge history. Blocks are carried as Newick fragments.
inline std::map<aford::CanonicalKey, Rational> kingman_law_by_histories(int m, long* histories = nullptr) {
  std::map<aford::CanonicalKey, Rational> out;
  long count = 0;
  auto rec = [&](auto&& self, std::vector<std::string> blocks, const Rational& p) -> void {
    if (blocks.size() == 2) {
      ++count;
      out[aford::canonical_key(aford::parse_newick("(" + blocks[0] + "," + blocks[1] + ");"))] += p;
      return;
    }
    const long b = static_cast<long>(blocks.size());
    const Rational each(2, b * (b - 1));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (std::size_t j = i + 1; j < blocks.size(); ++j) {
        std::vector<std::string> next;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          if (k != i && k != j) next.push_back(blocks[k]);
        }
        next.push_back("(" + blocks[i] + "," + blocks[j] + ")");
        self(self, next, p * each);
      }
    }
  };
  std::vector<std::string> start;
  for (int i = 1; i <= m; ++i) start.push_back(std::to_string(i));
  rec(rec, start, Rational(1));
  if (histories) *histories = count;
  return out;
}

}  // namespace oracle
