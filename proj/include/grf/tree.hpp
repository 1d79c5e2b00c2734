#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "grf/core_math.hpp"
#include "grf/dataset.hpp"
#include "grf/rng.hpp"

namespace grf {

// Rows with value <= threshold go to the left child.
struct SplitSpec {
  std::size_t feature = 0;
  double threshold = 0.0;

  bool goes_left(double value) const { return value <= threshold; }
  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct SplitCandidate {
  SplitSpec split;
  double weighted_gain = 0.0;
  double gain = 0.0;  // unweighted Gini gain
};

// Node of a flat, pre-order tree. Internal nodes carry a split and the raw Gini
// gain it achieved; every node keeps the class counts of the bootstrap rows
// that reached it.
struct TreeNode {
  std::optional<SplitSpec> split;
  double gain = 0.0;
  Count n_node = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  ClassCounts counts;
  int predicted_class = 0;

  bool is_leaf() const { return !split.has_value(); }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t n_features = 0;
  int n_classes = 0;
  std::size_t n_bootstrap_rows = 0;
  std::uint64_t seed = 0;

  const TreeNode& root() const { return nodes.front(); }
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeConfig {
  std::size_t mtry = 1;
  std::size_t min_leaf_size = 1;
  std::optional<int> max_depth;
  std::uint64_t seed = 0;
  bool bootstrap = true;
};

// Features already split on by earlier trees of a sequential (regularized)
// forest. Members keep their full gain; everything else is scaled by lambda.
class UsedFeatureSet {
 public:
  explicit UsedFeatureSet(std::size_t n_features = 0) : used_(n_features, 0) {}

  bool contains(std::size_t f) const { return used_[f] != 0; }
  void insert(std::size_t f) {
    if (!used_[f]) {
      used_[f] = 1;
      ++size_;
    }
  }
  std::size_t size() const { return size_; }
  std::size_t n_features() const { return used_.size(); }

 private:
  std::vector<char> used_;
  std::size_t size_ = 0;
};

// n_rows indices drawn uniformly from [0, n_rows) with replacement.
std::vector<std::size_t> bootstrap_sample(Rng& rng, std::size_t n_rows);

// mtry distinct indices from [0, n_features), returned in ascending order.
// Throws mtry-exceeds-features.
std::vector<std::size_t> sample_features(Rng& rng, std::size_t n_features, std::size_t mtry);

// Best (feature, threshold) over the given rows maximizing lambda_i * gain.
// Thresholds are midpoints between consecutive distinct values; ties go to
// the lowest feature index, then the lowest threshold. Returns nullopt for
// pure or too-small nodes and when no split has positive weighted gain.
// With `used` set, features it contains are not penalized.
std::optional<SplitCandidate> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidate_features,
                                         const RegWeights& weights, std::size_t min_leaf_size = 1,
                                         const UsedFeatureSet* used = nullptr);

// Grows one tree on a bootstrap sample of `data`. A non-null `used` selects
// sequential (regularized) mode; the set is read and extended in place.
Tree build_tree(const Dataset& data, const TreeConfig& config, const RegWeights& weights,
                UsedFeatureSet* used = nullptr);

// Same, reusing a precomputed column-major copy of `data`.
Tree build_tree(const Dataset& data, const ColumnMajor& columns, const TreeConfig& config,
                const RegWeights& weights, UsedFeatureSet* used = nullptr);

// Throws feature-count-mismatch when row.size() != tree.n_features.
int predict_tree(const Tree& tree, std::span<const double> row);

}  // namespace grf
