#include "grf/pipeline.hpp"

#include <fstream>
#include <string>

#include "grf/error.hpp"
#include "grf/model_io.hpp"
#include "grf/rng.hpp"

namespace grf {

std::uint64_t guide_seed(const ForestConfig& config) {
  return derive_seed(config.master_seed, stream::kGuide);
}
std::uint64_t selector_seed(const ForestConfig& config) {
  return derive_seed(config.master_seed, stream::kSelector);
}
std::uint64_t final_seed(const ForestConfig& config) {
  return derive_seed(config.master_seed, stream::kFinal);
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::kGammaOutOfRange, "gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
}

ForestConfig stage_config(const ForestConfig& base, ForestMode mode, std::uint64_t seed) {
  ForestConfig c = base;
  c.mode = mode;
  c.master_seed = seed;
  c.gamma.reset();
  return c;
}

ForestSummary summarize(const Forest& f) {
  return {f.config.mode, f.config.master_seed, f.trees.size()};
}

}  // namespace

Forest build_guide_forest(const Dataset& data, const ForestConfig& config) {
  return build_forest(data, stage_config(config, ForestMode::kRF, guide_seed(config)));
}

SelectionRun select_from_importance(const Dataset& data, const ImportanceVector& importance,
                                    double gamma, ForestMode selector_mode,
                                    const ForestConfig& config) {
  check_gamma(gamma);
  if (selector_mode != ForestMode::kGRF && selector_mode != ForestMode::kGRRF) {
    throw Error(ErrorCode::kInvalidArgument, "selector must run in GRF or GRRF mode");
  }
  if (importance.raw.size() != data.n_features) {
    throw Error(ErrorCode::kFeatureCountMismatch, "importance vector does not match the dataset width");
  }
  RegWeights weights = compute_lambda(normalize_importance(importance), gamma);
  ForestConfig sc = stage_config(config, selector_mode, selector_seed(config));
  sc.gamma = gamma;
  Forest selector = build_forest(data, sc, weights);

  SelectionRun run{{}, std::nullopt, std::move(selector)};
  run.result.selected_features = feature_set(run.selector);
  run.result.guide_importance = importance;
  run.result.weights = std::move(weights);
  run.result.selector_forest = summarize(run.selector);
  return run;
}

SelectionRun run_guided_selection(const Dataset& data, double gamma, ForestMode selector_mode,
                                  const ForestConfig& config, const Forest* guide) {
  check_gamma(gamma);
  std::optional<Forest> built;
  if (!guide) {
    built = build_guide_forest(data, config);
    guide = &*built;
  }
  SelectionRun run = select_from_importance(data, importance(*guide), gamma, selector_mode, config);
  run.result.guide_forest = summarize(*guide);
  run.guide = built ? std::move(built) : std::optional<Forest>(*guide);
  return run;
}

SelectionResult grf_select(const Dataset& data, double gamma, const ForestConfig& config) {
  return run_guided_selection(data, gamma, ForestMode::kGRF, config).result;
}

SelectionResult grrf_select(const Dataset& data, double gamma, const ForestConfig& config) {
  return run_guided_selection(data, gamma, ForestMode::kGRRF, config).result;
}

int SelectedModel::predict(std::span<const double> row) const {
  if (row.size() != n_original_features) {
    throw Error(ErrorCode::kFeatureCountMismatch,
                "row has " + std::to_string(row.size()) + " features, model expects " +
                    std::to_string(n_original_features));
  }
  std::vector<double> reduced(column_map.size());
  for (std::size_t j = 0; j < column_map.size(); ++j) reduced[j] = row[column_map[j]];
  return grf::predict(forest, reduced);
}

std::vector<int> SelectedModel::predict(const Dataset& rows) const {
  if (rows.n_features != n_original_features) {
    throw Error(ErrorCode::kFeatureCountMismatch,
                "rows have " + std::to_string(rows.n_features) + " features, model expects " +
                    std::to_string(n_original_features));
  }
  return grf::predict(forest, select_columns(rows, column_map));
}

SelectedModel train_on_selection(const Dataset& data, const SelectionResult& selection,
                                 const ForestConfig& config) {
  if (selection.selected_features.empty()) {
    throw Error(ErrorCode::kEmptySelection, "the selector forest used no features");
  }
  ForestConfig fc = stage_config(config, ForestMode::kRF, final_seed(config));
  fc.mtry = 0;
  SelectedModel model;
  model.selection = selection;
  model.column_map = selection.selected_features;
  model.n_original_features = data.n_features;
  model.forest = build_forest(select_columns(data, model.column_map), fc);
  return model;
}

SelectedModel grf_rf(const Dataset& data, double gamma, const ForestConfig& config) {
  return train_on_selection(data, grf_select(data, gamma, config), config);
}

SelectedModel grrf_rf(const Dataset& data, double gamma, const ForestConfig& config) {
  return train_on_selection(data, grrf_select(data, gamma, config), config);
}

SelectionResult select_with_custom_weights(const Dataset& data, const RegWeights& lambda,
                                           const ForestConfig& config) {
  if (lambda.lambda.size() != data.n_features) {
    throw Error(ErrorCode::kLambdaLengthMismatch,
                "expected " + std::to_string(data.n_features) + " weights, got " +
                    std::to_string(lambda.lambda.size()));
  }
  for (std::size_t i = 0; i < lambda.lambda.size(); ++i) {
    const double l = lambda.lambda[i];
    if (!(l >= 0.0 && l <= 1.0)) {
      throw Error(ErrorCode::kLambdaOutOfRange, "weight for feature " + std::to_string(i) + " outside [0, 1]");
    }
  }
  ForestConfig sc = stage_config(config, ForestMode::kGRF, selector_seed(config));
  Forest selector = build_forest(data, sc, lambda);
  SelectionResult result;
  result.selected_features = feature_set(selector);
  result.weights = lambda;
  result.selector_forest = summarize(selector);
  return result;
}

RegWeights read_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open weights file '" + path + "'");
  RegWeights w;
  w.gamma = 1.0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    double v = 0.0;
    try {
      v = parse_double(std::string_view(line).substr(first, last - first + 1));
    } catch (const Error&) {
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(line_no) + ": not a real number");
    }
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kLambdaOutOfRange,
                  path + ":" + std::to_string(line_no) + ": weight " + format_double(v) + " outside [0, 1]");
    }
    w.lambda.push_back(v);
  }
  return w;
}

void write_weights_file(const RegWeights& weights, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  for (double l : weights.lambda) out << format_double(l) << '\n';
}

}  // namespace grf
