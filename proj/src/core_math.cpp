#include "grf/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "grf/error.hpp"

namespace grf {

ClassCounts::ClassCounts(std::size_t n_classes) : counts_(std::max<std::size_t>(n_classes, 1), 0) {}

ClassCounts::ClassCounts(std::vector<Count> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) counts_.push_back(0);
  for (Count c : counts_) {
    if (c < 0) throw Error(ErrorCode::kInvalidArgument, "negative class count");
    total_ += c;
  }
}

void ClassCounts::add(int class_id, Count n) {
  counts_.at(static_cast<std::size_t>(class_id)) += n;
  total_ += n;
}

int ClassCounts::majority_class() const {
  // max_element returns the first maximum, i.e. the lowest class id on ties.
  return static_cast<int>(std::max_element(counts_.begin(), counts_.end()) - counts_.begin());
}

ImportanceVector ImportanceVector::from_raw(std::vector<double> raw) {
  ImportanceVector imp;
  imp.max_raw = raw.empty() ? 0.0 : *std::max_element(raw.begin(), raw.end());
  imp.raw = std::move(raw);
  return imp;
}

RegWeights RegWeights::ones(std::size_t n_features) {
  return RegWeights{std::vector<double>(n_features, 1.0), 0.0};
}

double gini_gain(const ClassCounts& parent, const ClassCounts& left, const ClassCounts& right) {
  if (left.n_classes() != parent.n_classes() || right.n_classes() != parent.n_classes()) {
    throw Error(ErrorCode::kChildCountsMismatch, "children have a different number of classes");
  }
  for (std::size_t c = 0; c < parent.n_classes(); ++c) {
    if (left[c] + right[c] != parent[c]) {
      throw Error(ErrorCode::kChildCountsMismatch,
                  "left + right != parent for class " + std::to_string(c));
    }
  }
  if (parent.total() == 0) return 0.0;
  return gini_gain_unchecked(gini_impurity(parent), parent.total(), left.counts(), left.total(),
                             right.counts(), right.total());
}

std::vector<double> normalize_importance(const ImportanceVector& imp) {
  if (!(imp.max_raw > 0.0)) {
    throw Error(ErrorCode::kAllZeroImportance,
                "every importance score is zero; the guide forest never split "
                "(try increasing the number of trees)");
  }
  std::vector<double> out(imp.raw.size());
  std::transform(imp.raw.begin(), imp.raw.end(), out.begin(),
                 [&](double v) { return v / imp.max_raw; });
  return out;
}

RegWeights compute_lambda(std::span<const double> normalized_imp, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::kGammaOutOfRange, "gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
  RegWeights w;
  w.gamma = gamma;
  w.lambda.reserve(normalized_imp.size());
  for (double imp : normalized_imp) {
    if (!(imp >= 0.0 && imp <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "normalized importance outside [0, 1]");
    }
    w.lambda.push_back(std::clamp((1.0 - gamma) + gamma * imp, 0.0, 1.0));
  }
  return w;
}

}  // namespace grf
