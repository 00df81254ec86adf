#pragma once

#include "aford/cladogram.hpp"

#include <string>
#include <string_view>

namespace aford {

/// Newick text with integer leaf labels. The unrooted tree is written from
/// the internal vertex adjacent to leaf 1, children ordered by their
/// smallest label: the unique 4-cladogram with cherries {1,2},{3,4} is
/// "(1,2,(3,4));". The 2-cladogram is "(1,2);".
std::string to_newick(const Cladogram& t);

/// Parses rooted or unrooted binary Newick with integer labels 1..m. A
/// degree-2 root is suppressed. Branch lengths and internal labels are not
/// accepted. Throws std::invalid_argument on malformed text and
/// StructuralError on a non-binary tree or bad label set.
Cladogram parse_newick(std::string_view text);

}  // namespace aford
