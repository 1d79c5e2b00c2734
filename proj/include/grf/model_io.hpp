#pragma once

#include <iosfwd>
#include <string>

#include "grf/forest.hpp"

namespace grf {

// Line-oriented text model format:
//
//   grf-model 1
//   mode GRF
//   master_seed 42
//   gamma 1
//   n_trees 500
//   n_features 500
//   n_classes 2
//   mtry 22
//   min_leaf_size 1
//   max_depth none
//   bootstrap 1
//   rrf_lambda 0.8
//   classes <name> <name> ...        (names percent-escaped)
//   lambda <l_0> <l_1> ...
//   tree <index> seed <seed> n_bootstrap <rows> n_nodes <k>
//   I <feature> <threshold> <gain> <count_0> <count_1> ...   internal node
//   L <count_0> <count_1> ...                                leaf
//   ...
//   end
//
// Nodes are listed in pre-order (node, left subtree, right subtree). Reals are
// written in shortest round-trip form, so parse(serialize(f)) is exact.
std::string serialize_forest(const Forest& forest);

// Only the tree records (from the first "tree" line up to "end"). Two forests
// with identical structure produce identical text regardless of mode/gamma.
std::string serialize_trees(const Forest& forest);

Forest parse_forest(const std::string& text);

void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace grf
