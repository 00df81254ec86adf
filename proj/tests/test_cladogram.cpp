#include "aford/cladogram.hpp"
#include "aford/ford.hpp"
#include "aford/mutable_tree.hpp"
#include "aford/newick.hpp"
#include "aford/tree.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace aford;

namespace {

Cladogram three() { return insert_leaf(Cladogram{}, Edge{0, 1}, 3); }

Cladogram random_tree(int n, std::uint64_t seed, const char* alpha = "1/2") {
  Rng rng(seed);
  return sample_ford_cladogram(AlphaParam::parse(alpha), n, rng);
}

}  // namespace

TEST_CASE("insert_leaf builds the unique small cladograms") {
  const Cladogram t3 = three();
  CHECK(t3.leaf_count() == 3);
  CHECK(t3.internal_count() == 1);
  CHECK(canonical_key(t3).to_string() == "3:");
  CHECK(enumerate_cladograms(3).size() == 1);

  // Leaf 4 on the external edge of leaf 1 pairs {1,4} and {2,3}.
  const Cladogram t4 = insert_leaf(t3, Edge{0, t3.neighbors(0)[0]}, 4);
  CHECK(canonical_key(t4) == canonical_key(parse_newick("((1,4),(2,3));")));
  CHECK(canonical_key(t4).to_string() == "4:{2,3}");
}

TEST_CASE("repeated insertion keeps the counting invariants") {
  Cladogram t;
  Rng rng(3);
  for (int n = 3; n <= 40; ++n) {
    const auto edges = t.edges();
    t = insert_leaf(t, edges[rng.uniform_index(edges.size())], n);
    t.validate();
    CHECK(t.leaf_count() == n);
    CHECK(t.internal_count() == n - 2);
    CHECK(static_cast<int>(t.edges().size()) == 2 * n - 3);
  }
}

TEST_CASE("insert_leaf shifts labels at or above the new label") {
  const Cladogram t = parse_newick("((1,2),(3,4));");
  const Cladogram u = insert_leaf(t, Edge{0, t.neighbors(0)[0]}, 2);
  // Old 2,3,4 became 3,4,5; the new leaf 2 sits next to leaf 1.
  CHECK(canonical_key(u) == canonical_key(parse_newick("(((1,2),3),(4,5));")));
}

TEST_CASE("insert_leaf rejects bad edges and labels") {
  const Cladogram t = parse_newick("((1,2),(3,4));");
  CHECK_THROWS_AS(insert_leaf(t, Edge{0, 1}, 5), StructuralError);
  CHECK_THROWS_AS(insert_leaf(t, Edge{0, 99}, 5), StructuralError);
  CHECK_THROWS_AS(insert_leaf(t, t.edges()[0], 0), StructuralError);
  CHECK_THROWS_AS(insert_leaf(t, t.edges()[0], 6), StructuralError);
}

TEST_CASE("delete_leaf") {
  const Cladogram t = parse_newick("((1,2),(3,4));");
  for (int k = 1; k <= 4; ++k) CHECK(canonical_key(delete_leaf(t, k)).to_string() == "3:");
  CHECK_THROWS_AS(delete_leaf(Cladogram{}, 1), StructuralError);
  CHECK_THROWS_AS(delete_leaf(t, 5), StructuralError);
  CHECK_THROWS_AS(delete_leaf(t, 0), StructuralError);

  // 5-caterpillar 1-2-3-4-5 with cherries {1,2},{4,5}: removing 2 turns old 3 into 2.
  const Cladogram cat = parse_newick("((1,2),3,(4,5));");
  CHECK(canonical_key(delete_leaf(cat, 2)) == canonical_key(parse_newick("((1,2),(3,4));")));
  CHECK(canonical_key(delete_leaf(cat, 3)) == canonical_key(parse_newick("((1,2),(3,4));")));
}

TEST_CASE("delete_leaf undoes insert_leaf on every edge") {
  for (int n : {3, 5, 8, 13}) {
    const Cladogram t = random_tree(n, 100 + static_cast<std::uint64_t>(n));
    for (const auto& e : t.edges()) {
      for (int label : {1, n / 2 + 1, n + 1}) {
        const Cladogram grown = insert_leaf(t, e, label);
        grown.validate();
        CHECK(same_cladogram(delete_leaf(grown, label), t));
      }
    }
  }
}

TEST_CASE("cherries") {
  CHECK(cherries(parse_newick("((1,2),(3,4),(5,(6,7)));")).size() == 6);
  CHECK(cherries(parse_newick("((1,2),(3,(4,5)),(6,(7,8)));")).size() == 6);
  for (const auto& t : enumerate_cladograms(4)) CHECK(cherries(t).size() == 4);
  const Cladogram caterpillar = parse_newick("((1,2),3,(4,(5,6)));");
  CHECK(cherries(caterpillar) == std::vector<int>{1, 2, 5, 6});
  CHECK(cherries(parse_newick("((1,2),(3,4),(5,6));")).size() == 6);
  CHECK(cherries(three()).size() == 3);
  CHECK(cherries(Cladogram{}).size() == 2);
  CHECK(is_cherry(caterpillar, 1));
  CHECK_FALSE(is_cherry(caterpillar, 3));
}

TEST_CASE("cherry count is even and between 4 and m") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 4 + static_cast<int>(seed % 20);
    const auto c = cherries(random_tree(n, seed, seed % 2 ? "0" : "1/3")).size();
    CHECK(c % 2 == 0);
    CHECK(c >= 4);
    CHECK(static_cast<int>(c) <= n);
  }
}

TEST_CASE("classify_edges") {
  for (auto [m, in] : {std::pair{2, 0}, {3, 0}, {4, 1}, {7, 4}}) {
    const Cladogram t = m == 2 ? Cladogram{} : random_tree(m, 9);
    const auto classes = classify_edges(t);
    CHECK(static_cast<int>(classes.external.size()) == (m == 2 ? 1 : m));
    CHECK(static_cast<int>(classes.internal.size()) == in);
    for (const auto& e : classes.external) CHECK(is_external(t, e));
    for (const auto& e : classes.internal) CHECK_FALSE(is_external(t, e));
  }
}

TEST_CASE("canonical keys identify labelled cladograms") {
  const auto a = parse_newick("((1,2),(3,4));");
  const auto b = parse_newick("((1,3),(2,4));");
  CHECK(canonical_key(a) != canonical_key(b));
  CHECK(canonical_key(a) == canonical_key(parse_newick("((4,3),(2,1));")));
  CHECK(canonical_key(a) == canonical_key(parse_newick("(1,2,(3,4));")));

  // Permuting internal vertex ids leaves the key alone.
  const Cladogram t = random_tree(12, 5);
  std::vector<int> labels(static_cast<std::size_t>(t.vertex_count()), 0);
  std::vector<int> perm(static_cast<std::size_t>(t.vertex_count()));
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  for (int v = 0; v < t.vertex_count(); ++v) labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = t.label_of(v);
  std::vector<Edge> edges;
  for (const auto& e : t.edges()) edges.push_back({perm[static_cast<std::size_t>(e.u)], perm[static_cast<std::size_t>(e.v)]});
  const Cladogram shuffled = Cladogram::from_labelled_edges(labels, edges);
  CHECK(canonical_key(shuffled) == canonical_key(t));
}

TEST_CASE("enumeration sizes and distinct keys") {
  CHECK(enumerate_cladograms(2).size() == 1);
  CHECK(enumerate_cladograms(3).size() == 1);
  CHECK(enumerate_cladograms(4).size() == 3);
  CHECK(enumerate_cladograms(5).size() == 15);
  CHECK(enumerate_cladograms(6).size() == 105);
  for (int m = 4; m <= 8; ++m) {
    const auto all = enumerate_cladograms(m);
    CHECK(all.size() == cladogram_count(m));
    CHECK(all.size() == odd_double_factorial(m - 2));
    std::set<CanonicalKey> keys;
    for (const auto& t : all) keys.insert(canonical_key(t));
    CHECK(keys.size() == all.size());
    CHECK(std::is_sorted(all.begin(), all.end(), [](const Cladogram& x, const Cladogram& y) {
      return canonical_key(x) < canonical_key(y);
    }));
  }
  CHECK_THROWS_AS(enumerate_cladograms(9), ResourceGuardError);
  CHECK(enumerate_cladograms(9, 9).size() == 135135);
  CHECK_THROWS_AS(enumerate_cladograms(1), std::invalid_argument);
}

TEST_CASE("enumeration agrees with brute-force insertion at m = 4") {
  std::set<CanonicalKey> brute;
  const Cladogram t3 = three();
  for (const auto& e : t3.edges()) brute.insert(canonical_key(insert_leaf(t3, e, 4)));
  std::set<CanonicalKey> listed;
  for (const auto& t : enumerate_cladograms(4)) listed.insert(canonical_key(t));
  CHECK(brute == listed);
}

TEST_CASE("relabel") {
  const Cladogram t = parse_newick("((1,2),(3,4));");
  const std::vector<int> perm{1, 3, 2, 4};
  CHECK(canonical_key(relabel(t, perm)) == canonical_key(parse_newick("((1,3),(2,4));")));
  const std::vector<int> bad{1, 1, 2, 3};
  CHECK_THROWS(relabel(t, bad));
}

TEST_CASE("newick round trip") {
  CHECK(to_newick(Cladogram{}) == "(1,2);");
  CHECK(to_newick(parse_newick("((3,4),(2,1));")) == "(1,2,(3,4));");
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Cladogram t = random_tree(3 + static_cast<int>(seed), seed, "0.3");
    const Cladogram back = parse_newick(to_newick(t));
    CHECK(same_cladogram(back, t));
  }
  CHECK(same_cladogram(parse_newick("(1,2);"), Cladogram{}));
  CHECK_THROWS_AS(parse_newick("((1,2),(3,4)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_newick("((1,2),(x,4));"), std::invalid_argument);
  CHECK_THROWS(parse_newick("((1,2,3),(4,5));"));
  CHECK_THROWS(parse_newick("((1,2),(3,5));"));
  CHECK_THROWS(parse_newick("((1,1),(2,3));"));
}

TEST_CASE("shape examples") {
  for (const auto& t : enumerate_cladograms(4)) {
    const FiniteMeasureTree tree(t);
    const std::vector<int> u{0, 1, 2, 3};
    CHECK(same_cladogram(shape(tree, u), t));
  }
  const auto cat = build_comb_tree(6);
  const std::vector<int> three_leaves{0, 3, 5};
  CHECK(canonical_key(shape(cat, three_leaves)).to_string() == "3:");

  const auto comb = build_comb_tree(10);
  const std::vector<int> u{0, 1, 8, 9};
  CHECK(canonical_key(shape(comb, u)) == canonical_key(parse_newick("((1,2),(3,4));")));
  const std::vector<int> two{4, 7};
  CHECK(same_cladogram(shape(comb, two), Cladogram{}));

  const std::vector<int> dup{0, 1, 1};
  CHECK_THROWS_AS(shape(comb, dup), std::invalid_argument);
  const std::vector<int> internal{0, 1, 12};
  CHECK_THROWS_AS(shape(comb, internal), std::invalid_argument);
}

TEST_CASE("shape agrees with the split oracle on random trees and samples") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform_index(30));
    const Cladogram t = random_tree(n, 1000 + static_cast<std::uint64_t>(trial), trial % 3 == 0 ? "0" : "0.7");
    const FiniteMeasureTree tree(t);
    const int m = 2 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(std::min(n, 8) - 1)));
    std::vector<int> leaves(static_cast<std::size_t>(n));
    std::iota(leaves.begin(), leaves.end(), 0);
    std::shuffle(leaves.begin(), leaves.end(), rng);
    leaves.resize(static_cast<std::size_t>(m));
    const Cladogram s = shape(tree, leaves);
    s.validate();
    CHECK(canonical_key(s) == oracle::shape_key(t, leaves));
  }
}

TEST_CASE("shape is consistent under sub-sampling") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const FiniteMeasureTree tree(random_tree(25, 50 + static_cast<std::uint64_t>(trial)));
    std::vector<int> u(25);
    std::iota(u.begin(), u.end(), 0);
    std::shuffle(u.begin(), u.end(), rng);
    u.resize(7);
    Cladogram s = shape(tree, u);
    for (int j = 6; j >= 2; --j) {
      s = delete_leaf(s, j + 1);
      const std::vector<int> prefix(u.begin(), u.begin() + j);
      CHECK(same_cladogram(s, shape(tree, prefix)));
    }
  }
}

TEST_CASE("labelled shape handles repeated samples") {
  const FiniteMeasureTree tree(parse_newick("((1,2),(3,(4,5)));"));
  const std::vector<int> u{3, 0, 3, 1};
  const auto ls = labelled_shape(tree, u);
  CHECK_FALSE(ls.injective());
  CHECK(ls.tree.leaf_count() == 3);
  CHECK(ls.sample_to_leaf == std::vector<int>{1, 2, 1, 3});
  const std::vector<int> v{0, 1, 2};
  CHECK(labelled_shape(tree, v).injective());
  const std::vector<int> same{2, 2};
  CHECK_THROWS(labelled_shape(tree, same));
}

TEST_CASE("mutable tree detach and reattach stay consistent") {
  Rng rng(5);
  MutableTree t = MutableTree::from_cladogram(random_tree(30, 77));
  t.audit();
  for (int i = 0; i < 20'000; ++i) {
    const int k = static_cast<int>(rng.uniform_index(30));
    const int hub = t.detach(k);
    Edge e;
    if (rng.uniform01() < 0.5 && t.internal_edge_count() > 0) {
      e = t.internal_edge(rng.uniform_index(t.internal_edge_count()));
    } else {
      int j = static_cast<int>(rng.uniform_index(29));
      if (j >= k) ++j;
      e = t.external_edge(j);
    }
    t.reattach(k, hub, e);
    if (i % 1000 == 0) t.audit();
  }
  t.audit();
  t.to_cladogram().validate();
  CHECK(t.internal_edge_count() == 27);
}
