#pragma once

#include <optional>
#include <string>
#include <variant>

#include "grf/dataset.hpp"

namespace grf {

struct CsvSchema {
  // Column name, or 0-based index; unset means the last column.
  std::optional<std::variant<std::string, std::size_t>> label_column;
  char delimiter = ',';
  bool header = true;
  // When false every column is a feature and the dataset has no labels
  // (n_classes 0); used for prediction inputs.
  bool has_label = true;
};

// Loads a numeric feature matrix with one categorical label column. Labels are
// mapped to dense ids in first-appearance order; the names are kept in
// Dataset::class_names.
Dataset load_csv(const std::string& path, const CsvSchema& schema = {});
Dataset parse_csv(const std::string& text, const CsvSchema& schema = {},
                  const std::string& source = "<memory>");

// Header row (feature names, then "class"), features at full precision, label
// column last with original class names.
std::string to_csv(const Dataset& data, char delimiter = ',');
void write_csv(const Dataset& data, const std::string& path, char delimiter = ',');

}  // namespace grf
