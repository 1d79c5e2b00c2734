#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "grf/core_math.hpp"
#include "grf/dataset.hpp"
#include "grf/tree.hpp"

namespace grf {

// RF and GRF trees are independent; RRF and GRRF trees share a used-feature
// set and are grown strictly in index order.
enum class ForestMode { kRF, kGRF, kRRF, kGRRF };

std::string_view mode_name(ForestMode mode);
ForestMode parse_mode(std::string_view name);
bool is_sequential(ForestMode mode);

inline constexpr double kDefaultGrfGamma = 1.0;
inline constexpr double kDefaultGrrfGamma = 0.1;
inline constexpr double kDefaultRrfLambda = 0.8;

struct ForestConfig {
  std::size_t n_trees = 1000;
  ForestMode mode = ForestMode::kRF;
  std::optional<double> gamma;  // unset: 1 for GRF, 0.1 for GRRF, 0 otherwise
  std::size_t mtry = 0;         // 0: floor(sqrt(n_features))
  std::uint64_t master_seed = 1;
  std::size_t min_leaf_size = 1;
  std::optional<int> max_depth;
  bool bootstrap = true;
  double rrf_lambda = kDefaultRrfLambda;
  int workers = 0;  // 0: available parallelism, capped by n_trees

  double resolved_gamma() const;
  std::size_t resolved_mtry(std::size_t n_features) const;
  int resolved_workers() const;
};

struct Forest {
  std::vector<Tree> trees;
  ForestConfig config;
  RegWeights weights_used;
  int n_classes = 0;
  std::size_t n_features = 0;
  std::vector<std::string> class_names;

  friend bool operator==(const Forest&, const Forest&) = default;
};

// Builds the ensemble. GRF and GRRF need `weights` (missing-weights otherwise);
// RF ignores them; RRF falls back to a constant rrf_lambda. RF and GRF trees are
// distributed over an OpenMP team; the result does not depend on its size.
Forest build_forest(const Dataset& data, const ForestConfig& config,
                    const std::optional<RegWeights>& weights = std::nullopt);

// Single-threaded reference of build_forest, kept for equivalence tests and
// the benchmark.
Forest build_forest_serial(const Dataset& data, const ForestConfig& config,
                           const std::optional<RegWeights>& weights = std::nullopt);

// Majority vote, ties to the lowest class id.
int predict(const Forest& forest, std::span<const double> row);
std::vector<int> predict(const Forest& forest, const Dataset& rows);
std::vector<int> predict_serial(const Forest& forest, const Dataset& rows);

// Vote counts per class for one row.
std::vector<Count> votes(const Forest& forest, std::span<const double> row);

// Mean decrease in Gini: per tree, sum over splits on feature i of
// (n_node / n_bootstrap_rows) * gain, then averaged over trees.
ImportanceVector importance(const Forest& forest);

// Distinct features used by any split, ascending.
std::vector<std::size_t> feature_set(const Forest& forest);

// Out-of-bag error, recomputed from each tree's stored seed. Diagnostic only;
// nullopt when no row is out of bag for any tree or bootstrap is off.
std::optional<double> oob_error(const Forest& forest, const Dataset& data);

}  // namespace grf
