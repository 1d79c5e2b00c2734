#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace grf {

using Count = std::int64_t;

// Class distribution of the rows reaching a node. `total` is kept equal to the
// sum of `counts`; at least one class slot always exists.
class ClassCounts {
 public:
  explicit ClassCounts(std::size_t n_classes = 1);
  explicit ClassCounts(std::vector<Count> counts);

  void add(int class_id, Count n = 1);

  std::span<const Count> counts() const { return counts_; }
  Count operator[](std::size_t c) const { return counts_[c]; }
  Count total() const { return total_; }
  std::size_t n_classes() const { return counts_.size(); }

  // Lowest class id among those with the maximal count.
  int majority_class() const;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;

 private:
  std::vector<Count> counts_;
  Count total_ = 0;
};

// Per-feature mean decrease in Gini (Imp_i) together with its maximum (Imp*).
struct ImportanceVector {
  std::vector<double> raw;
  double max_raw = 0.0;

  static ImportanceVector from_raw(std::vector<double> raw);
};

// Per-feature gain multipliers, lambda_i = (1 - gamma) + gamma * Imp_i / Imp*.
struct RegWeights {
  std::vector<double> lambda;
  double gamma = 0.0;

  static RegWeights ones(std::size_t n_features);
  std::size_t size() const { return lambda.size(); }
};

// 1 - sum_c (counts[c] / total)^2, or 0 for an empty node.
inline double gini_impurity(std::span<const Count> counts, Count total) {
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double sum_sq = 0.0;
  for (Count c : counts) {
    const double p = static_cast<double>(c) / n;
    sum_sq += p * p;
  }
  const double g = 1.0 - sum_sq;
  return g > 0.0 ? g : 0.0;
}

inline double gini_impurity(const ClassCounts& counts) {
  return gini_impurity(counts.counts(), counts.total());
}

// Same formula as gini_gain() without validation, for callers that derive the
// right child as parent - left. Both entry points produce bit-identical results.
// Children with identical class proportions give exactly 0; otherwise tiny
// negative cancellation residue is clamped to 0.
inline double gini_gain_unchecked(double parent_impurity, Count parent_total,
                                  std::span<const Count> left, Count left_total,
                                  std::span<const Count> right, Count right_total) {
  bool proportional = true;
  for (std::size_t c = 0; c < left.size() && proportional; ++c) {
    proportional = left[c] * right_total == right[c] * left_total;
  }
  if (proportional) return 0.0;
  const double n = static_cast<double>(parent_total);
  const double gain = parent_impurity -
                      (static_cast<double>(left_total) / n) * gini_impurity(left, left_total) -
                      (static_cast<double>(right_total) / n) * gini_impurity(right, right_total);
  return gain > 0.0 ? gain : 0.0;
}

// Size-weighted decrease in Gini impurity. Throws child-counts-mismatch when
// left + right does not reproduce parent componentwise.
double gini_gain(const ClassCounts& parent, const ClassCounts& left,
                 const ClassCounts& right);

// raw[i] / max_raw. Throws all-zero-importance when max_raw == 0.
std::vector<double> normalize_importance(const ImportanceVector& imp);

RegWeights compute_lambda(std::span<const double> normalized_imp, double gamma);

inline double weighted_gain(double lambda_i, double gain) { return lambda_i * gain; }

}  // namespace grf
