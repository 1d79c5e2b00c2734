#include "grf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include <omp.h>

#include "grf/error.hpp"
#include "grf/rng.hpp"

namespace grf {

std::string_view mode_name(ForestMode mode) {
  switch (mode) {
    case ForestMode::kRF: return "RF";
    case ForestMode::kGRF: return "GRF";
    case ForestMode::kRRF: return "RRF";
    case ForestMode::kGRRF: return "GRRF";
  }
  return "?";
}

ForestMode parse_mode(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "rf") return ForestMode::kRF;
  if (lower == "grf") return ForestMode::kGRF;
  if (lower == "rrf") return ForestMode::kRRF;
  if (lower == "grrf") return ForestMode::kGRRF;
  throw Error(ErrorCode::kInvalidArgument, "unknown forest mode '" + std::string(name) + "'");
}

bool is_sequential(ForestMode mode) {
  return mode == ForestMode::kRRF || mode == ForestMode::kGRRF;
}

double ForestConfig::resolved_gamma() const {
  if (gamma) return *gamma;
  switch (mode) {
    case ForestMode::kGRF: return kDefaultGrfGamma;
    case ForestMode::kGRRF: return kDefaultGrrfGamma;
    default: return 0.0;
  }
}

std::size_t ForestConfig::resolved_mtry(std::size_t n_features) const {
  if (mtry != 0) return mtry;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
}

int ForestConfig::resolved_workers() const {
  int w = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min<int>(w, static_cast<int>(std::max<std::size_t>(n_trees, 1))));
}

namespace {

RegWeights resolve_weights(const Dataset& data, const ForestConfig& config,
                           const std::optional<RegWeights>& weights) {
  switch (config.mode) {
    case ForestMode::kRF:
      return RegWeights::ones(data.n_features);
    case ForestMode::kRRF:
      if (!weights) {
        if (!(config.rrf_lambda >= 0.0 && config.rrf_lambda <= 1.0)) {
          throw Error(ErrorCode::kLambdaOutOfRange, "rrf_lambda must lie in [0, 1]");
        }
        return RegWeights{std::vector<double>(data.n_features, config.rrf_lambda), 0.0};
      }
      break;
    case ForestMode::kGRF:
    case ForestMode::kGRRF:
      if (!weights) {
        throw Error(ErrorCode::kMissingWeights,
                    std::string(mode_name(config.mode)) + " requires per-feature weights");
      }
      break;
  }
  if (weights->lambda.size() != data.n_features) {
    throw Error(ErrorCode::kLambdaLengthMismatch,
                "expected " + std::to_string(data.n_features) + " weights, got " +
                    std::to_string(weights->lambda.size()));
  }
  for (double l : weights->lambda) {
    if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorCode::kLambdaOutOfRange, "lambda outside [0, 1]");
  }
  return *weights;
}

struct Prepared {
  ForestConfig config;
  RegWeights weights;
  TreeConfig tree;
};

Prepared prepare(const Dataset& data, const ForestConfig& config,
                 const std::optional<RegWeights>& weights) {
  data.validate();
  if (config.n_trees < 1) throw Error(ErrorCode::kInvalidArgument, "n_trees must be >= 1");
  const double gamma = config.resolved_gamma();
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::kGammaOutOfRange, "gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
  Prepared p{config, resolve_weights(data, config, weights), {}};
  p.config.gamma = gamma;
  p.config.mtry = config.resolved_mtry(data.n_features);
  if (p.config.mtry > data.n_features) {
    throw Error(ErrorCode::kMtryExceedsFeatures,
                "mtry " + std::to_string(p.config.mtry) + " exceeds " + std::to_string(data.n_features) + " features");
  }
  p.tree.mtry = p.config.mtry;
  p.tree.min_leaf_size = config.min_leaf_size;
  p.tree.max_depth = config.max_depth;
  p.tree.bootstrap = config.bootstrap;
  return p;
}

Forest empty_forest(const Dataset& data, const Prepared& p) {
  Forest forest;
  forest.config = p.config;
  forest.weights_used = p.weights;
  forest.n_classes = data.n_classes;
  forest.n_features = data.n_features;
  forest.class_names = data.class_names;
  forest.trees.resize(p.config.n_trees);
  return forest;
}

TreeConfig tree_config_for(const Prepared& p, std::size_t t) {
  TreeConfig tc = p.tree;
  tc.seed = derive_seed(p.config.master_seed, t);
  return tc;
}

void build_sequential(const Dataset& data, const ColumnMajor& columns, const Prepared& p,
                      Forest& forest) {
  UsedFeatureSet used(data.n_features);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    forest.trees[t] = build_tree(data, columns, tree_config_for(p, t), p.weights, &used);
  }
}

void build_independent_serial(const Dataset& data, const ColumnMajor& columns, const Prepared& p,
                              Forest& forest) {
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    forest.trees[t] = build_tree(data, columns, tree_config_for(p, t), p.weights);
  }
}

}  // namespace

Forest build_forest(const Dataset& data, const ForestConfig& config,
                    const std::optional<RegWeights>& weights) {
  Prepared p = prepare(data, config, weights);
  p.config.workers = config.resolved_workers();
  Forest forest = empty_forest(data, p);
  const ColumnMajor columns(data);
  if (is_sequential(p.config.mode) || p.config.workers == 1) {
    if (is_sequential(p.config.mode)) {
      build_sequential(data, columns, p, forest);
    } else {
      build_independent_serial(data, columns, p, forest);
    }
    return forest;
  }

  const auto n_trees = static_cast<std::int64_t>(forest.trees.size());
  std::exception_ptr failure;
#pragma omp parallel for num_threads(p.config.workers) schedule(dynamic, 1)
  for (std::int64_t t = 0; t < n_trees; ++t) {
    try {
      forest.trees[static_cast<std::size_t>(t)] =
          build_tree(data, columns, tree_config_for(p, static_cast<std::size_t>(t)), p.weights);
    } catch (...) {
#pragma omp critical(grf_forest_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return forest;
}

Forest build_forest_serial(const Dataset& data, const ForestConfig& config,
                           const std::optional<RegWeights>& weights) {
  Prepared p = prepare(data, config, weights);
  p.config.workers = 1;
  Forest forest = empty_forest(data, p);
  const ColumnMajor columns(data);
  if (is_sequential(p.config.mode)) {
    build_sequential(data, columns, p, forest);
  } else {
    build_independent_serial(data, columns, p, forest);
  }
  return forest;
}

std::vector<Count> votes(const Forest& forest, std::span<const double> row) {
  std::vector<Count> v(static_cast<std::size_t>(std::max(forest.n_classes, 1)), 0);
  for (const Tree& tree : forest.trees) ++v[static_cast<std::size_t>(predict_tree(tree, row))];
  return v;
}

int predict(const Forest& forest, std::span<const double> row) {
  if (row.size() != forest.n_features) {
    throw Error(ErrorCode::kFeatureCountMismatch,
                "row has " + std::to_string(row.size()) + " features, forest expects " +
                    std::to_string(forest.n_features));
  }
  const auto v = votes(forest, row);
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

namespace {

void check_width(const Forest& forest, const Dataset& rows) {
  if (rows.n_features != forest.n_features) {
    throw Error(ErrorCode::kFeatureCountMismatch,
                "rows have " + std::to_string(rows.n_features) + " features, forest expects " +
                    std::to_string(forest.n_features));
  }
}

}  // namespace

std::vector<int> predict_serial(const Forest& forest, const Dataset& rows) {
  check_width(forest, rows);
  std::vector<int> out(rows.n_rows);
  for (std::size_t r = 0; r < rows.n_rows; ++r) out[r] = predict(forest, rows.row(r));
  return out;
}

std::vector<int> predict(const Forest& forest, const Dataset& rows) {
  check_width(forest, rows);
  std::vector<int> out(rows.n_rows);
  const auto n = static_cast<std::int64_t>(rows.n_rows);
#pragma omp parallel for num_threads(forest.config.resolved_workers()) schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] = predict(forest, rows.row(static_cast<std::size_t>(r)));
  }
  return out;
}

ImportanceVector importance(const Forest& forest) {
  std::vector<double> total(forest.n_features, 0.0);
  std::vector<double> per_tree(forest.n_features);
  for (const Tree& tree : forest.trees) {
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    const double n_boot = static_cast<double>(tree.n_bootstrap_rows);
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) continue;
      per_tree[node.split->feature] += (static_cast<double>(node.n_node) / n_boot) * node.gain;
    }
    for (std::size_t f = 0; f < total.size(); ++f) total[f] += per_tree[f];
  }
  if (!forest.trees.empty()) {
    for (double& v : total) v /= static_cast<double>(forest.trees.size());
  }
  return ImportanceVector::from_raw(std::move(total));
}

std::vector<std::size_t> feature_set(const Forest& forest) {
  std::vector<char> used(forest.n_features, 0);
  for (const Tree& tree : forest.trees) {
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf()) used[node.split->feature] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < used.size(); ++f) {
    if (used[f]) out.push_back(f);
  }
  return out;
}

std::optional<double> oob_error(const Forest& forest, const Dataset& data) {
  check_width(forest, data);
  if (!forest.config.bootstrap) return std::nullopt;
  std::vector<std::vector<Count>> oob_votes(data.n_rows, std::vector<Count>(static_cast<std::size_t>(forest.n_classes), 0));
  std::vector<char> in_bag(data.n_rows);
  for (const Tree& tree : forest.trees) {
    Rng rng = make_rng(tree.seed);
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (std::size_t r : bootstrap_sample(rng, data.n_rows)) in_bag[r] = 1;
    for (std::size_t r = 0; r < data.n_rows; ++r) {
      if (!in_bag[r]) ++oob_votes[r][static_cast<std::size_t>(predict_tree(tree, data.row(r)))];
    }
  }
  std::size_t scored = 0;
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < data.n_rows; ++r) {
    const auto& v = oob_votes[r];
    if (std::all_of(v.begin(), v.end(), [](Count c) { return c == 0; })) continue;
    ++scored;
    const int cls = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
    if (cls != data.labels[r]) ++wrong;
  }
  if (scored == 0) return std::nullopt;
  return static_cast<double>(wrong) / static_cast<double>(scored);
}

}  // namespace grf
