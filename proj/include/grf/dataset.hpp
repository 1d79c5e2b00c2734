#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace grf {

// Numeric feature matrix (row-major) with dense class ids in [0, n_classes).
// `class_names[c]` is the original label text for class id c.
struct Dataset {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> values;
  std::vector<int> labels;
  int n_classes = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * n_features, n_features};
  }
  double at(std::size_t r, std::size_t f) const { return values[r * n_features + f]; }

  // Throws invalid-argument when sizes or label ranges are inconsistent.
  void validate() const;
};

// Copies of `data` restricted to a subset of rows / columns. Class ids and
// names are preserved.
Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows);
Dataset select_columns(const Dataset& data, std::span<const std::size_t> columns);

// Column-major copy of the feature matrix, used by the split search. Each
// cell also carries its dense rank within the column (equal values share a
// rank) and `distinct(f)[rank]` recovers the value.
struct ColumnMajor {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> values;
  std::vector<std::uint32_t> ranks;
  std::vector<double> distinct_values;
  std::vector<std::size_t> distinct_offsets;  // n_features + 1 entries

  explicit ColumnMajor(const Dataset& data);
  std::span<const double> column(std::size_t f) const {
    return {values.data() + f * n_rows, n_rows};
  }
  std::span<const std::uint32_t> rank_column(std::size_t f) const {
    return {ranks.data() + f * n_rows, n_rows};
  }
  std::span<const double> distinct(std::size_t f) const {
    return {distinct_values.data() + distinct_offsets[f], distinct_offsets[f + 1] - distinct_offsets[f]};
  }
};

}  // namespace grf
