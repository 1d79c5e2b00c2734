#include "grf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "grf/error.hpp"

namespace grf {

void Dataset::validate() const {
  if (n_rows == 0 || n_features == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dataset must have at least one row and one feature");
  }
  if (values.size() != n_rows * n_features) {
    throw Error(ErrorCode::kInvalidArgument, "value matrix size does not match n_rows * n_features");
  }
  if (labels.size() != n_rows) {
    throw Error(ErrorCode::kInvalidArgument, "label count does not match n_rows");
  }
  if (n_classes < 1) throw Error(ErrorCode::kInvalidArgument, "n_classes must be positive");
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw Error(ErrorCode::kInvalidArgument, "label " + std::to_string(y) + " outside [0, n_classes)");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kMissingValue, "dataset contains a non-finite value");
  }
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.n_rows = rows.size();
  out.n_features = data.n_features;
  out.n_classes = data.n_classes;
  out.feature_names = data.feature_names;
  out.class_names = data.class_names;
  out.values.reserve(rows.size() * data.n_features);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    auto src = data.row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
    out.labels.push_back(data.labels[r]);
  }
  return out;
}

Dataset select_columns(const Dataset& data, std::span<const std::size_t> columns) {
  Dataset out;
  out.n_rows = data.n_rows;
  out.n_features = columns.size();
  out.n_classes = data.n_classes;
  out.class_names = data.class_names;
  out.labels = data.labels;
  out.values.reserve(data.n_rows * columns.size());
  for (std::size_t r = 0; r < data.n_rows; ++r) {
    for (std::size_t c : columns) {
      if (c >= data.n_features) {
        throw Error(ErrorCode::kFeatureCountMismatch, "column index " + std::to_string(c) + " out of range");
      }
      out.values.push_back(data.at(r, c));
    }
  }
  if (!data.feature_names.empty()) {
    for (std::size_t c : columns) out.feature_names.push_back(data.feature_names[c]);
  }
  return out;
}

ColumnMajor::ColumnMajor(const Dataset& data)
    : n_rows(data.n_rows), n_features(data.n_features), values(data.n_rows * data.n_features),
      ranks(data.n_rows * data.n_features) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t f = 0; f < n_features; ++f) values[f * n_rows + r] = data.at(r, f);
  }
  distinct_offsets.reserve(n_features + 1);
  distinct_offsets.push_back(0);
  std::vector<std::size_t> order(n_rows);
  for (std::size_t f = 0; f < n_features; ++f) {
    const double* col = values.data() + f * n_rows;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    std::uint32_t rank = 0;
    for (std::size_t i = 0; i < n_rows; ++i) {
      if (i > 0 && col[order[i]] != col[order[i - 1]]) ++rank;
      if (i == 0 || col[order[i]] != col[order[i - 1]]) distinct_values.push_back(col[order[i]]);
      ranks[f * n_rows + order[i]] = rank;
    }
    distinct_offsets.push_back(distinct_values.size());
  }
}

}  // namespace grf
