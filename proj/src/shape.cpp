#include "aford/cladogram.hpp"
#include "aford/tree.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace aford {

Cladogram shape(const FiniteMeasureTree& tree, std::span<const int> u) {
  const int m = static_cast<int>(u.size());
  if (m < 2) throw std::invalid_argument("shape: need at least two sample points");
  for (int v : u) {
    if (v < 0 || v >= tree.vertex_count() || !tree.is_leaf(v)) {
      throw std::invalid_argument("shape: sample points must be leaves");
    }
  }

  // Virtual tree: the samples plus LCAs of preorder-adjacent samples.
  std::vector<int> nodes(u.begin(), u.end());
  std::sort(nodes.begin(), nodes.end(),
            [&](int a, int b) { return tree.entry(a) < tree.entry(b); });
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw std::invalid_argument("shape: sample points must be pairwise distinct");
  }
  for (int i = 0; i + 1 < m; ++i) {
    nodes.push_back(tree.lca(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(i) + 1]));
  }
  std::sort(nodes.begin(), nodes.end(),
            [&](int a, int b) { return tree.entry(a) < tree.entry(b); });
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::unordered_map<int, int> label;
  for (int i = 0; i < m; ++i) label[u[static_cast<std::size_t>(i)]] = i + 1;

  const int n = static_cast<int>(nodes.size());
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::unordered_map<int, int> local;
  for (int i = 0; i < n; ++i) {
    local[nodes[static_cast<std::size_t>(i)]] = i;
    if (auto it = label.find(nodes[static_cast<std::size_t>(i)]); it != label.end()) {
      labels[static_cast<std::size_t>(i)] = it->second;
    }
  }

  std::vector<Edge> edges;
  std::vector<int> stack;
  for (int v : nodes) {
    while (!stack.empty() && !tree.is_ancestor(stack.back(), v)) stack.pop_back();
    if (!stack.empty()) edges.push_back({local[stack.back()], local[v]});
    stack.push_back(v);
  }

  // The virtual root has two children unless it is itself a sample (the
  // tree root, leaf 1). Suppress it when it has degree 2.
  const int top = 0;
  if (labels[top] == 0) {
    std::vector<int> kids;
    std::vector<Edge> kept;
    for (const Edge& e : edges) {
      if (e.u == top) {
        kids.push_back(e.v);
      } else {
        kept.push_back(e);
      }
    }
    if (kids.size() == 2) {
      kept.push_back({kids[0], kids[1]});
      // Move the last vertex into slot 0 to keep ids contiguous.
      const int last = n - 1;
      for (Edge& e : kept) {
        if (e.u == last) e.u = top;
        if (e.v == last) e.v = top;
      }
      labels[top] = labels[static_cast<std::size_t>(last)];
      labels.pop_back();
      return Cladogram::from_labelled_edges(labels, kept);
    }
  }
  return Cladogram::from_labelled_edges(labels, edges);
}

LabelledCladogram labelled_shape(const FiniteMeasureTree& tree, std::span<const int> u) {
  std::vector<int> distinct;
  std::vector<int> sample_to_leaf;
  sample_to_leaf.reserve(u.size());
  for (int v : u) {
    auto it = std::find(distinct.begin(), distinct.end(), v);
    if (it == distinct.end()) {
      distinct.push_back(v);
      sample_to_leaf.push_back(static_cast<int>(distinct.size()));
    } else {
      sample_to_leaf.push_back(static_cast<int>(it - distinct.begin()) + 1);
    }
  }
  if (distinct.size() < 2) throw std::invalid_argument("labelled_shape: need two distinct leaves");
  return {shape(tree, distinct), std::move(sample_to_leaf)};
}

}  // namespace aford
