#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grf/core_math.hpp"
#include "grf/dataset.hpp"
#include "grf/forest.hpp"

namespace grf {

struct ForestSummary {
  ForestMode mode = ForestMode::kRF;
  std::uint64_t seed = 0;
  std::size_t n_trees = 0;
};

struct SelectionResult {
  std::vector<std::size_t> selected_features;  // feaSet of the selector forest
  ImportanceVector guide_importance;           // empty for custom weights
  RegWeights weights;
  std::optional<ForestSummary> guide_forest;
  ForestSummary selector_forest;
};

// A selection together with the forests that produced it.
struct SelectionRun {
  SelectionResult result;
  std::optional<Forest> guide;
  Forest selector;
};

// Forest trained on a column subset; predicts from rows in the original
// feature space through `column_map`.
struct SelectedModel {
  SelectionResult selection;
  Forest forest;
  std::vector<std::size_t> column_map;  // reduced column j reads original column_map[j]
  std::size_t n_original_features = 0;

  int predict(std::span<const double> row) const;
  std::vector<int> predict(const Dataset& rows) const;
};

// Seeds of the three pipeline stages, all derived from config.master_seed.
std::uint64_t guide_seed(const ForestConfig& config);
std::uint64_t selector_seed(const ForestConfig& config);
std::uint64_t final_seed(const ForestConfig& config);

// Plain RF on the full data with the guide seed.
Forest build_guide_forest(const Dataset& data, const ForestConfig& config);

// importance -> normalize -> lambda -> selector forest (GRF or GRRF mode).
SelectionRun select_from_importance(const Dataset& data, const ImportanceVector& importance,
                                    double gamma, ForestMode selector_mode,
                                    const ForestConfig& config);

// Full guided selection. Reuses `guide` when given, otherwise builds it.
SelectionRun run_guided_selection(const Dataset& data, double gamma, ForestMode selector_mode,
                                  const ForestConfig& config, const Forest* guide = nullptr);

SelectionResult grf_select(const Dataset& data, double gamma, const ForestConfig& config);
SelectionResult grrf_select(const Dataset& data, double gamma, const ForestConfig& config);

// Plain RF on the selected columns, mtry recomputed from the reduced width.
// Throws empty-selection.
SelectedModel train_on_selection(const Dataset& data, const SelectionResult& selection,
                                 const ForestConfig& config);

SelectedModel grf_rf(const Dataset& data, double gamma, const ForestConfig& config);
SelectedModel grrf_rf(const Dataset& data, double gamma, const ForestConfig& config);

// GRF driven directly by user-supplied lambda (no guide forest).
SelectionResult select_with_custom_weights(const Dataset& data, const RegWeights& lambda,
                                           const ForestConfig& config);

// One real per line, ordered by feature index, each in [0, 1]. Blank lines
// and lines starting with '#' are skipped.
RegWeights read_weights_file(const std::string& path);
void write_weights_file(const RegWeights& weights, const std::string& path);

}  // namespace grf
