#include "grf/tree.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "grf/error.hpp"

namespace grf {

std::vector<std::size_t> bootstrap_sample(Rng& rng, std::size_t n_rows) {
  std::vector<std::size_t> rows(n_rows);
  for (auto& r : rows) r = static_cast<std::size_t>(uniform_index(rng, n_rows));
  return rows;
}

namespace {

// Partial Fisher-Yates over a caller-owned permutation. Any permutation is a
// valid starting state, so the buffer is reused across nodes without reset.
void draw_features(Rng& rng, std::vector<std::size_t>& perm, std::size_t mtry,
                   std::vector<std::size_t>& out) {
  const std::size_t n = perm.size();
  for (std::size_t i = 0; i < mtry; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(perm[i], perm[j]);
  }
  out.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(mtry));
  std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<std::size_t> sample_features(Rng& rng, std::size_t n_features, std::size_t mtry) {
  if (mtry < 1 || mtry > n_features) {
    throw Error(ErrorCode::kMtryExceedsFeatures,
                "mtry " + std::to_string(mtry) + " not in [1, " + std::to_string(n_features) + "]");
  }
  std::vector<std::size_t> perm(n_features);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> out;
  draw_features(rng, perm, mtry, out);
  return out;
}

namespace {

// Midpoint of two distinct doubles that still separates them under `<=`.
double midpoint(double lo, double hi) {
  double mid = lo + (hi - lo) / 2.0;
  if (!(mid < hi)) mid = lo;
  return mid;
}

// Scans every threshold of the candidate features. Per feature the rows are
// ordered either by sorting (rank, label) keys or, for nodes that are large
// relative to the number of distinct values, by a counting pass over ranks.
// Both orderings visit identical boundaries with identical class counts.
class SplitFinder {
 public:
  SplitFinder(const Dataset& data, const ColumnMajor& columns)
      : data_(data), columns_(columns), n_classes_(static_cast<std::size_t>(data.n_classes)),
        left_(n_classes_), right_(n_classes_) {}

  static constexpr double kPruneMargin = 1e-10;

  std::optional<SplitCandidate> find(std::span<const std::size_t> rows,
                                     std::span<const std::size_t> features,
                                     const ClassCounts& parent, const RegWeights& weights,
                                     std::size_t min_leaf_size, const UsedFeatureSet* used) {
    n_ = parent.total();
    if (n_ < static_cast<Count>(2 * min_leaf_size)) return std::nullopt;
    if (reciprocal_.size() <= static_cast<std::size_t>(n_)) {
      const std::size_t old_size = std::max<std::size_t>(reciprocal_.size(), 1);
      reciprocal_.resize(static_cast<std::size_t>(n_) + 1, 0.0);
      for (std::size_t k = old_size; k < reciprocal_.size(); ++k) reciprocal_[k] = 1.0 / static_cast<double>(k);
    }
    parent_impurity_ = gini_impurity(parent);
    if (parent_impurity_ <= 0.0) return std::nullopt;
    parent_ = &parent;
    min_leaf_ = static_cast<Count>(min_leaf_size);
    best_.reset();
    best_weighted_ = 0.0;

    for (std::size_t f : features) {
      lambda_ = (used && used->contains(f)) ? 1.0 : weights.lambda[f];
      // gain <= parent impurity, so this feature cannot beat the incumbent.
      if (weighted_gain(lambda_, parent_impurity_) <= best_weighted_) continue;
      feature_ = f;
      const std::size_t n_distinct = columns_.distinct(f).size();
      if (n_distinct < 2) continue;
      if (n_distinct <= 32 * rows.size() + 512) {
        scan_by_counting(rows, n_distinct);
      } else {
        scan_by_sorting(rows);
      }
    }
    return best_;
  }

 private:
  // Left child holds `n_left` rows with values <= lo; the next value is hi.
  // Returns false once the right child has become too small.
  bool consider(Count n_left, double lo, double hi) {
    const Count n_right = n_ - n_left;
    if (n_right < min_leaf_) return false;
    if (n_left < min_leaf_) return true;
    // gain = impurity - 1 + (sum L_c^2 / n_left + sum R_c^2 / n_right) / n. A
    // reciprocal-table estimate of it is within ~1e-15 of the exact value, so
    // boundaries that trail the incumbent by more than kPruneMargin cannot win.
    Count sum_left = 0;
    Count sum_right = 0;
    for (std::size_t c = 0; c < n_classes_; ++c) {
      right_[c] = (*parent_)[c] - left_[c];
      sum_left += left_[c] * left_[c];
      sum_right += right_[c] * right_[c];
    }
    const double estimate =
        parent_impurity_ - 1.0 +
        (static_cast<double>(sum_left) * reciprocal_[static_cast<std::size_t>(n_left)] +
         static_cast<double>(sum_right) * reciprocal_[static_cast<std::size_t>(n_right)]) *
            reciprocal_[static_cast<std::size_t>(n_)];
    if (lambda_ * estimate < best_weighted_ - kPruneMargin) return true;

    const double gain = gini_gain_unchecked(parent_impurity_, n_, left_, n_left, right_, n_right);
    const double weighted = weighted_gain(lambda_, gain);
    if (weighted > best_weighted_) {
      best_weighted_ = weighted;
      best_ = SplitCandidate{SplitSpec{feature_, midpoint(lo, hi)}, weighted, gain};
    }
    return true;
  }

  void scan_by_counting(std::span<const std::size_t> rows, std::size_t n_distinct) {
    const auto ranks = columns_.rank_column(feature_);
    const auto distinct = columns_.distinct(feature_);
    // One slot per class plus the bucket total.
    const std::size_t stride = n_classes_ + 1;
    histogram_.assign(n_distinct * stride, 0);
    for (std::size_t r : rows) {
      Count* bucket = histogram_.data() + ranks[r] * stride;
      ++bucket[static_cast<std::size_t>(data_.labels[r])];
      ++bucket[n_classes_];
    }
    std::fill(left_.begin(), left_.end(), 0);
    Count n_left = 0;
    std::size_t prev = n_distinct;
    for (std::size_t k = 0; k < n_distinct; ++k) {
      const Count* bucket = histogram_.data() + k * stride;
      if (bucket[n_classes_] == 0) continue;
      if (prev != n_distinct && !consider(n_left, distinct[prev], distinct[k])) return;
      for (std::size_t c = 0; c < n_classes_; ++c) left_[c] += bucket[c];
      n_left += bucket[n_classes_];
      prev = k;
    }
  }

  void scan_by_sorting(std::span<const std::size_t> rows) {
    const auto ranks = columns_.rank_column(feature_);
    const auto distinct = columns_.distinct(feature_);
    keys_.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      keys_[i] = (static_cast<std::uint64_t>(ranks[rows[i]]) << 32) |
                 static_cast<std::uint32_t>(data_.labels[rows[i]]);
    }
    std::sort(keys_.begin(), keys_.end());
    std::fill(left_.begin(), left_.end(), 0);
    Count n_left = 0;
    for (std::size_t i = 0; i + 1 < keys_.size(); ++i) {
      ++left_[static_cast<std::size_t>(keys_[i] & 0xffffffffULL)];
      ++n_left;
      const auto rank = keys_[i] >> 32;
      const auto next = keys_[i + 1] >> 32;
      if (rank == next) continue;
      if (!consider(n_left, distinct[rank], distinct[next])) return;
    }
  }

  const Dataset& data_;
  const ColumnMajor& columns_;
  std::size_t n_classes_;
  std::vector<Count> left_;
  std::vector<Count> right_;
  std::vector<Count> histogram_;
  std::vector<std::uint64_t> keys_;
  std::vector<double> reciprocal_;

  const ClassCounts* parent_ = nullptr;
  Count n_ = 0;
  Count min_leaf_ = 1;
  double parent_impurity_ = 0.0;
  double lambda_ = 1.0;
  std::size_t feature_ = 0;
  std::optional<SplitCandidate> best_;
  double best_weighted_ = 0.0;
};

ClassCounts count_classes(const Dataset& data, std::span<const std::size_t> rows) {
  ClassCounts counts(static_cast<std::size_t>(data.n_classes));
  for (std::size_t r : rows) counts.add(data.labels[r]);
  return counts;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ColumnMajor& columns, const TreeConfig& config,
              const RegWeights& weights, UsedFeatureSet* used)
      : data_(data), columns_(columns), config_(config), weights_(weights), used_(used),
        finder_(data, columns), rng_(make_rng(config.seed)), perm_(data.n_features) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  }

  Tree build() {
    Tree tree;
    tree.n_features = data_.n_features;
    tree.n_classes = data_.n_classes;
    tree.seed = config_.seed;
    if (config_.bootstrap) {
      rows_ = bootstrap_sample(rng_, data_.n_rows);
    } else {
      rows_.resize(data_.n_rows);
      std::iota(rows_.begin(), rows_.end(), std::size_t{0});
    }
    tree.n_bootstrap_rows = rows_.size();
    grow(tree, 0, rows_.size(), 0);
    return tree;
  }

 private:
  std::int32_t grow(Tree& tree, std::size_t begin, std::size_t end, int depth) {
    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    std::span<std::size_t> rows(rows_.data() + begin, end - begin);
    tree.nodes.emplace_back();
    {
      TreeNode& node = tree.nodes.back();
      node.counts = count_classes(data_, rows);
      node.n_node = node.counts.total();
      node.predicted_class = node.counts.majority_class();
    }

    const bool depth_left = !config_.max_depth || depth < *config_.max_depth;
    std::optional<SplitCandidate> split;
    if (depth_left && gini_impurity(tree.nodes[index].counts) > 0.0 &&
        rows.size() >= 2 * config_.min_leaf_size) {
      draw_features(rng_, perm_, config_.mtry, features_);
      split = finder_.find(rows, features_, tree.nodes[index].counts, weights_,
                           config_.min_leaf_size, used_);
    }
    if (!split) return index;

    const SplitSpec spec = split->split;
    auto column = columns_.column(spec.feature);
    auto mid = std::partition(rows.begin(), rows.end(),
                              [&](std::size_t r) { return spec.goes_left(column[r]); });
    const std::size_t n_left = static_cast<std::size_t>(mid - rows.begin());
    if (used_) used_->insert(spec.feature);

    tree.nodes[index].split = spec;
    tree.nodes[index].gain = split->gain;
    const auto left = grow(tree, begin, begin + n_left, depth + 1);
    const auto right = grow(tree, begin + n_left, end, depth + 1);
    tree.nodes[index].left = left;
    tree.nodes[index].right = right;
    return index;
  }

  const Dataset& data_;
  const ColumnMajor& columns_;
  const TreeConfig& config_;
  const RegWeights& weights_;
  UsedFeatureSet* used_;
  SplitFinder finder_;
  Rng rng_;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> features_;
};

void check_weights(const Dataset& data, const RegWeights& weights) {
  if (weights.lambda.size() != data.n_features) {
    throw Error(ErrorCode::kLambdaLengthMismatch,
                "expected " + std::to_string(data.n_features) + " weights, got " +
                    std::to_string(weights.lambda.size()));
  }
}

}  // namespace

std::optional<SplitCandidate> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidate_features,
                                         const RegWeights& weights, std::size_t min_leaf_size,
                                         const UsedFeatureSet* used) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "best_split needs at least one row");
  check_weights(data, weights);
  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  for (std::size_t f : features) {
    if (f >= data.n_features) throw Error(ErrorCode::kFeatureCountMismatch, "candidate feature out of range");
  }
  const ColumnMajor columns(data);
  SplitFinder finder(data, columns);
  return finder.find(rows, features, count_classes(data, rows), weights,
                     std::max<std::size_t>(min_leaf_size, 1), used);
}

Tree build_tree(const Dataset& data, const ColumnMajor& columns, const TreeConfig& config,
                const RegWeights& weights, UsedFeatureSet* used) {
  check_weights(data, weights);
  if (config.mtry < 1 || config.mtry > data.n_features) {
    throw Error(ErrorCode::kMtryExceedsFeatures,
                "mtry " + std::to_string(config.mtry) + " not in [1, " +
                    std::to_string(data.n_features) + "]");
  }
  if (config.min_leaf_size < 1) throw Error(ErrorCode::kInvalidArgument, "min_leaf_size must be >= 1");
  if (used && used->n_features() != data.n_features) {
    throw Error(ErrorCode::kFeatureCountMismatch, "used-feature set sized for a different dataset");
  }
  return TreeBuilder(data, columns, config, weights, used).build();
}

Tree build_tree(const Dataset& data, const TreeConfig& config, const RegWeights& weights,
                UsedFeatureSet* used) {
  const ColumnMajor columns(data);
  return build_tree(data, columns, config, weights, used);
}

int predict_tree(const Tree& tree, std::span<const double> row) {
  if (row.size() != tree.n_features) {
    throw Error(ErrorCode::kFeatureCountMismatch,
                "row has " + std::to_string(row.size()) + " features, tree expects " +
                    std::to_string(tree.n_features));
  }
  std::size_t i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const TreeNode& node = tree.nodes[i];
    i = static_cast<std::size_t>(node.split->goes_left(row[node.split->feature]) ? node.left : node.right);
  }
  return tree.nodes[i].predicted_class;
}

}  // namespace grf
