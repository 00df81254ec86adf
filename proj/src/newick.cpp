#include "aford/newick.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aford {

namespace {

int min_label_below(const Cladogram& t, int v, int from) {
  if (t.is_leaf(v)) return t.label_of(v);
  int best = t.leaf_count() + 1;
  for (int w : t.neighbors(v)) {
    if (w != from) best = std::min(best, min_label_below(t, w, v));
  }
  return best;
}

void write_subtree(const Cladogram& t, int v, int from, std::string& out) {
  if (t.is_leaf(v)) {
    out += std::to_string(t.label_of(v));
    return;
  }
  std::vector<std::pair<int, int>> children;
  for (int w : t.neighbors(v)) {
    if (w != from) children.emplace_back(min_label_below(t, w, v), w);
  }
  std::sort(children.begin(), children.end());
  out += '(';
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i) out += ',';
    write_subtree(t, children[i].second, v, out);
  }
  out += ')';
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  Cladogram parse() {
    const int root = parse_node();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ';') ++pos_;
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");

    const auto& root_children = children_[static_cast<std::size_t>(root)];
    if (labels_[static_cast<std::size_t>(root)] != 0) fail("a single leaf is not a cladogram");
    if (root_children.size() == 2) {
      // Rooted input: drop the root and join its two children.
      const int a = root_children[0];
      const int b = root_children[1];
      std::vector<Edge> edges;
      for (const Edge& e : edges_) {
        if (e.u != root && e.v != root) edges.push_back(e);
      }
      edges.push_back({a, b});
      std::vector<int> labels = labels_;
      // Keep numbering contiguous by moving the last vertex into the root slot.
      const int last = static_cast<int>(labels.size()) - 1;
      auto rename = [&](int v) { return v == last ? root : v; };
      for (Edge& e : edges) e = {rename(e.u), rename(e.v)};
      labels[static_cast<std::size_t>(root)] = labels[static_cast<std::size_t>(last)];
      labels.pop_back();
      return Cladogram::from_labelled_edges(labels, edges);
    }
    if (root_children.size() != 3) fail("root must have two or three children");
    return Cladogram::from_labelled_edges(labels_, edges_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("newick: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  int new_vertex(int label) {
    labels_.push_back(label);
    children_.emplace_back();
    return static_cast<int>(labels_.size()) - 1;
  }

  int parse_node() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '(') {
      ++pos_;
      const int v = new_vertex(0);
      for (;;) {
        const int child = parse_node();
        children_[static_cast<std::size_t>(v)].push_back(child);
        edges_.push_back({v, child});
        skip_space();
        if (pos_ >= text_.size()) fail("unbalanced parentheses");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail(std::string("unexpected character '") + text_[pos_] + "'");
      }
      return v;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a leaf label");
    if (pos_ - start > 9) fail("leaf label too long");
    const int label = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (label < 1) fail("leaf labels start at 1");
    return new_vertex(label);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<int> labels_;
  std::vector<std::vector<int>> children_;
  std::vector<Edge> edges_;
};

}  // namespace

std::string to_newick(const Cladogram& t) {
  if (t.leaf_count() == 2) return "(1,2);";
  std::string out;
  write_subtree(t, t.neighbors(t.leaf_vertex(1))[0], -1, out);
  out += ';';
  return out;
}

Cladogram parse_newick(std::string_view text) { return NewickParser(text).parse(); }

}  // namespace aford
