#pragma once

#include <cstdint>

#include "grf/dataset.hpp"

namespace grf {

// Two-relevant-feature benchmark: features i.i.d. uniform on [-1, 1]; the
// class is 1 when x[relevant_a] + x[relevant_b] is strictly above the sample
// median of that sum, else 0. Class names are "-1" and "1".
struct SyntheticSpec {
  std::size_t n_rows = 500;
  std::size_t n_features = 500;
  std::size_t relevant_a = 0;
  std::size_t relevant_b = 20;
  double low = -1.0;
  double high = 1.0;
  std::uint64_t seed = 1;
};

Dataset simulate_dataset(const SyntheticSpec& spec);

// Median as the mean of the two middle order statistics for even n.
double sample_median(std::vector<double> values);

}  // namespace grf
