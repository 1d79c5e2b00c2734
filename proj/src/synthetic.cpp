#include "grf/synthetic.hpp"

#include <algorithm>
#include <string>

#include "grf/error.hpp"
#include "grf/rng.hpp"

namespace grf {

double sample_median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "median of an empty sample");
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

Dataset simulate_dataset(const SyntheticSpec& spec) {
  if (spec.n_rows < 2 || spec.n_features < 1) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic data needs at least 2 rows and 1 feature");
  }
  if (spec.relevant_a == spec.relevant_b || spec.relevant_a >= spec.n_features ||
      spec.relevant_b >= spec.n_features) {
    throw Error(ErrorCode::kInvalidArgument, "relevant features must be distinct and < n_features");
  }
  if (!(spec.low < spec.high)) throw Error(ErrorCode::kInvalidArgument, "value range is empty");

  Dataset data;
  data.n_rows = spec.n_rows;
  data.n_features = spec.n_features;
  data.n_classes = 2;
  data.class_names = {"-1", "1"};
  data.values.resize(spec.n_rows * spec.n_features);
  Rng rng = make_rng(spec.seed);
  const double width = spec.high - spec.low;
  for (double& v : data.values) v = spec.low + width * uniform_unit(rng);
  for (std::size_t f = 0; f < spec.n_features; ++f) data.feature_names.push_back("f" + std::to_string(f));

  std::vector<double> score(spec.n_rows);
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    score[r] = data.at(r, spec.relevant_a) + data.at(r, spec.relevant_b);
  }
  const double median = sample_median(score);
  data.labels.resize(spec.n_rows);
  for (std::size_t r = 0; r < spec.n_rows; ++r) data.labels[r] = score[r] > median ? 1 : 0;
  return data;
}

}  // namespace grf
