#pragma once

// Brute-force split enumerator used as an independent check of best_split.
// It recounts both children from scratch for every (feature, threshold) pair
// instead of scanning sorted prefixes.

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <random>
#include <vector>

#include "grf/core_math.hpp"
#include "grf/dataset.hpp"
#include "grf/tree.hpp"

namespace grf::testing {

inline double oracle_midpoint(double lo, double hi) {
  double mid = lo + (hi - lo) / 2.0;
  if (!(mid < hi)) mid = lo;
  return mid;
}

inline std::optional<SplitCandidate> brute_force_split(const Dataset& data, const std::vector<std::size_t>& rows,
                                                       const std::vector<std::size_t>& features,
                                                       const RegWeights& weights, std::size_t min_leaf = 1,
                                                       const UsedFeatureSet* used = nullptr) {
  const auto k = static_cast<std::size_t>(data.n_classes);
  ClassCounts parent(k);
  for (auto r : rows) parent.add(data.labels[r]);
  if (parent.total() < static_cast<Count>(2 * min_leaf)) return std::nullopt;
  if (gini_impurity(parent) == 0.0) return std::nullopt;

  std::vector<std::size_t> sorted_features = features;
  std::sort(sorted_features.begin(), sorted_features.end());
  std::optional<SplitCandidate> best;
  double best_weighted = 0.0;
  for (auto f : sorted_features) {
    std::vector<double> values;
    for (auto r : rows) values.push_back(data.at(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double threshold = oracle_midpoint(values[i], values[i + 1]);
      ClassCounts left(k), right(k);
      for (auto r : rows) (data.at(r, f) <= threshold ? left : right).add(data.labels[r]);
      if (left.total() < static_cast<Count>(min_leaf) || right.total() < static_cast<Count>(min_leaf)) continue;
      const double gain = gini_gain(parent, left, right);
      const double lambda = (used && used->contains(f)) ? 1.0 : weights.lambda[f];
      const double weighted = lambda * gain;
      if (weighted > best_weighted) {
        best_weighted = weighted;
        best = SplitCandidate{SplitSpec{f, threshold}, weighted, gain};
      }
    }
  }
  return best;
}

// Small datasets with heavy value ties: values drawn from {0, .., levels-1}.
inline Dataset small_dataset(std::size_t n_rows, std::size_t n_features, std::uint32_t labels_mask,
                             std::mt19937_64& rng, int levels) {
  Dataset d;
  d.n_rows = n_rows;
  d.n_features = n_features;
  d.n_classes = 2;
  d.class_names = {"0", "1"};
  std::uniform_int_distribution<int> v(0, levels - 1);
  for (std::size_t i = 0; i < n_rows * n_features; ++i) d.values.push_back(static_cast<double>(v(rng)) * 0.5);
  for (std::size_t r = 0; r < n_rows; ++r) d.labels.push_back(static_cast<int>((labels_mask >> r) & 1u));
  return d;
}

struct OracleSweepResult {
  long cases = 0;
  long mismatches = 0;
};

inline bool same_split(const std::optional<SplitCandidate>& a, const std::optional<SplitCandidate>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->split == b->split && a->weighted_gain == b->weighted_gain && a->gain == b->gain;
}

// Every 2-class labeling of every size n_rows <= 8 and width <= 3, over
// `matrices_per_shape` random tie-heavy matrices each, with unit weights and
// with random weights (some exactly 0 and some tied).
inline OracleSweepResult sweep_split_oracle(int matrices_per_shape, std::uint64_t seed) {
  OracleSweepResult out;
  std::mt19937_64 rng(seed);
  const double lambda_choices[] = {0.0, 0.25, 0.5, 0.5, 1.0, 0.9};
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t p = 1; p <= 3; ++p) {
      for (int m = 0; m < matrices_per_shape; ++m) {
        const int levels = 2 + m % 5;
        std::mt19937_64 matrix_rng(rng());
        Dataset base = small_dataset(n, p, 0, matrix_rng, levels);
        RegWeights random_w;
        for (std::size_t f = 0; f < p; ++f) random_w.lambda.push_back(lambda_choices[rng() % 6]);
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
          for (std::size_t r = 0; r < n; ++r) base.labels[r] = static_cast<int>((mask >> r) & 1u);
          std::vector<std::size_t> rows(n);
          for (std::size_t r = 0; r < n; ++r) rows[r] = r;
          std::vector<std::size_t> features(p);
          for (std::size_t f = 0; f < p; ++f) features[f] = f;
          for (const RegWeights* w : std::initializer_list<const RegWeights*>{nullptr, &random_w}) {
            const RegWeights weights = w ? *w : RegWeights::ones(p);
            for (std::size_t min_leaf : {std::size_t{1}, std::size_t{2}}) {
              ++out.cases;
              if (!same_split(best_split(base, rows, features, weights, min_leaf),
                              brute_force_split(base, rows, features, weights, min_leaf))) {
                ++out.mismatches;
              }
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace grf::testing
