#include "grf/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "grf/csv.hpp"
#include "grf/error.hpp"
#include "grf/forest.hpp"
#include "grf/harness.hpp"
#include "grf/model_io.hpp"
#include "grf/pipeline.hpp"
#include "grf/synthetic.hpp"

namespace grf {

namespace {

struct CommonOptions {
  std::uint64_t seed = 1;
  std::size_t trees = 1000;
  std::optional<double> gamma;
  std::size_t mtry = 0;
  int workers = 0;
  std::string mode = "rf";
  std::string label_col;
  std::string out;
  std::size_t min_leaf = 1;
  int max_depth = 0;
  double rrf_lambda = kDefaultRrfLambda;
};

void add_forest_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--trees", o.trees, "Number of trees")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", o.gamma, "Guidance strength in [0, 1]");
  cmd->add_option("--mtry", o.mtry, "Candidate features per node (0: floor(sqrt(p)))");
  cmd->add_option("--workers", o.workers, "Worker threads (0: available parallelism)");
  cmd->add_option("--min-leaf", o.min_leaf, "Minimum rows per leaf")->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", o.max_depth, "Maximum tree depth (0: unlimited)");
}

CsvSchema schema_from(const std::string& label_col) {
  CsvSchema schema;
  if (label_col.empty()) return schema;
  std::size_t idx = 0;
  auto [end, ec] = std::from_chars(label_col.data(), label_col.data() + label_col.size(), idx);
  if (ec == std::errc() && end == label_col.data() + label_col.size()) {
    schema.label_column = idx;
  } else {
    schema.label_column = label_col;
  }
  return schema;
}

ForestConfig forest_config(const CommonOptions& o) {
  ForestConfig c;
  c.n_trees = o.trees;
  c.mode = parse_mode(o.mode);
  c.gamma = o.gamma;
  c.mtry = o.mtry;
  c.master_seed = o.seed;
  c.workers = o.workers;
  c.min_leaf_size = o.min_leaf;
  if (o.max_depth > 0) c.max_depth = o.max_depth;
  c.rrf_lambda = o.rrf_lambda;
  return c;
}

void check_gamma(const std::optional<double>& gamma) {
  if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0)) {
    throw Error(ErrorCode::kGammaOutOfRange, "gamma must lie in [0, 1], got " + format_double(*gamma));
  }
}

void print_forest_config(std::ostream& out, const ForestConfig& c, std::size_t n_features) {
  out << "config: mode=" << mode_name(c.mode) << " trees=" << c.n_trees << " master_seed=" << c.master_seed
      << " gamma=" << format_double(c.resolved_gamma()) << " mtry=" << c.resolved_mtry(n_features)
      << " min_leaf=" << c.min_leaf_size
      << " max_depth=" << (c.max_depth ? std::to_string(*c.max_depth) : std::string("none"))
      << " workers=" << c.resolved_workers() << '\n';
}

void print_dataset(std::ostream& out, const std::string& path, const Dataset& d) {
  out << "data: " << path << " rows=" << d.n_rows << " features=" << d.n_features << " classes=" << d.n_classes
      << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  return f;
}

std::pair<std::size_t, std::size_t> parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const auto num = std::stoul(text.substr(0, slash));
    const auto den = std::stoul(text.substr(slash + 1));
    return {num, den};
  }
  const double v = parse_double(text);
  // Decimal fractions are taken to three places.
  return {static_cast<std::size_t>(v * 1000.0 + 0.5), 1000};
}

int cmd_simulate(std::ostream& out, const SyntheticSpec& spec, const std::string& path) {
  out << "config: simulate seed=" << spec.seed << " rows=" << spec.n_rows << " features=" << spec.n_features
      << " relevant=" << spec.relevant_a << "," << spec.relevant_b << '\n';
  const Dataset data = simulate_dataset(spec);
  write_csv(data, path);
  out << "wrote " << path << '\n';
  return 0;
}

int cmd_train(std::ostream& out, const CommonOptions& o, const std::string& in_path,
              const std::string& weights_path) {
  check_gamma(o.gamma);
  const Dataset data = load_csv(in_path, schema_from(o.label_col));
  print_dataset(out, in_path, data);
  ForestConfig config = forest_config(o);

  std::optional<RegWeights> weights;
  const bool guided = config.mode == ForestMode::kGRF || config.mode == ForestMode::kGRRF;
  if (!weights_path.empty()) {
    weights = read_weights_file(weights_path);
    out << "config: weights=" << weights_path << '\n';
  } else if (guided) {
    // Derive lambda from a guide RF exactly as the selection pipeline does.
    out << "config: guide_seed=" << guide_seed(config) << '\n';
    const Forest guide = build_guide_forest(data, config);
    weights = compute_lambda(normalize_importance(importance(guide)), config.resolved_gamma());
  }
  print_forest_config(out, config, data.n_features);
  const Forest forest = build_forest(data, config, weights);
  save_forest(forest, o.out);
  out << "trees=" << forest.trees.size() << " features_used=" << feature_set(forest).size() << '\n';
  if (const auto oob = oob_error(forest, data)) out << "oob_error=" << format_double(*oob) << " (diagnostic)\n";
  out << "wrote " << o.out << '\n';
  return 0;
}

int cmd_select(std::ostream& out, const CommonOptions& o, const std::string& in_path, const std::string& variant,
               const std::string& weights_path, const std::string& lambda_out) {
  check_gamma(o.gamma);
  const Dataset data = load_csv(in_path, schema_from(o.label_col));
  print_dataset(out, in_path, data);
  ForestConfig config = forest_config(o);

  SelectionResult result;
  if (variant == "custom") {
    if (weights_path.empty()) throw Error(ErrorCode::kMissingWeights, "--variant custom needs --weights");
    out << "config: variant=custom weights=" << weights_path << " selector_seed=" << selector_seed(config) << '\n';
    print_forest_config(out, config, data.n_features);
    result = select_with_custom_weights(data, read_weights_file(weights_path), config);
  } else if (variant == "grf" || variant == "grrf") {
    const bool grrf = variant == "grrf";
    const double gamma = o.gamma.value_or(grrf ? kDefaultGrrfGamma : kDefaultGrfGamma);
    out << "config: variant=" << variant << " gamma=" << format_double(gamma) << " guide_seed=" << guide_seed(config)
        << " selector_seed=" << selector_seed(config) << '\n';
    print_forest_config(out, config, data.n_features);
    result = grrf ? grrf_select(data, gamma, config) : grf_select(data, gamma, config);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + variant + "' (grf, grrf, custom)");
  }

  out << "selected " << result.selected_features.size() << " of " << data.n_features << " features\n";
  auto file = open_out(o.out);
  for (std::size_t f : result.selected_features) {
    file << f;
    if (f < data.feature_names.size()) file << '\t' << data.feature_names[f];
    file << '\n';
  }
  out << "wrote " << o.out << '\n';
  if (!lambda_out.empty()) {
    write_weights_file(result.weights, lambda_out);
    out << "wrote " << lambda_out << '\n';
  }
  return 0;
}

int cmd_predict(std::ostream& out, const std::string& model_path, const std::string& in_path,
                const std::string& label_col, const std::string& out_path, bool no_labels) {
  const Forest forest = load_forest(model_path);
  out << "config: model=" << model_path << " mode=" << mode_name(forest.config.mode)
      << " trees=" << forest.trees.size() << " master_seed=" << forest.config.master_seed << '\n';
  CsvSchema schema = schema_from(label_col);
  schema.has_label = !no_labels;
  const Dataset data = load_csv(in_path, schema);
  print_dataset(out, in_path, data);
  const std::vector<int> pred = predict(forest, data);

  std::ostream* sink = &out;
  std::ofstream file;
  if (!out_path.empty()) {
    file = open_out(out_path);
    sink = &file;
  }
  for (int p : pred) {
    const auto idx = static_cast<std::size_t>(p);
    *sink << (idx < forest.class_names.size() ? forest.class_names[idx] : std::to_string(p)) << '\n';
  }
  if (!no_labels) {
    // Label ids in the input follow its own first-appearance order; compare by name.
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < pred.size(); ++r) {
      const auto& truth = data.class_names[static_cast<std::size_t>(data.labels[r])];
      const auto idx = static_cast<std::size_t>(pred[r]);
      const std::string name = idx < forest.class_names.size() ? forest.class_names[idx] : std::to_string(pred[r]);
      wrong += name != truth ? 1 : 0;
    }
    out << "misclassified " << wrong << " of " << pred.size() << " (error "
        << format_double(static_cast<double>(wrong) / static_cast<double>(pred.size())) << ")\n";
  }
  if (!out_path.empty()) out << "wrote " << out_path << '\n';
  return 0;
}

struct EvaluateOptions {
  std::vector<std::string> inputs;
  bool synthetic = false;
  std::uint64_t synthetic_seed = 1;
  std::string methods = "grf-rf,grf,rf,grrf,grrf-rf";
  std::string baseline;
  std::size_t replicates = 100;
  std::string train_fraction = "2/3";
  bool unstratified = false;
  double grrf_gamma = kDefaultGrrfGamma;
  bool parallel_replicates = false;
  std::string csv_out;
};

int cmd_evaluate(std::ostream& out, const CommonOptions& o, const EvaluateOptions& e) {
  check_gamma(o.gamma);
  if (!(e.grrf_gamma >= 0.0 && e.grrf_gamma <= 1.0)) {
    throw Error(ErrorCode::kGammaOutOfRange, "grrf gamma must lie in [0, 1]");
  }
  std::vector<NamedDataset> datasets;
  for (const auto& path : e.inputs) {
    auto name = path.substr(path.find_last_of('/') + 1);
    if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    datasets.push_back({name, load_csv(path, schema_from(o.label_col))});
    print_dataset(out, path, datasets.back().data);
  }
  if (e.synthetic) {
    SyntheticSpec spec;
    spec.seed = e.synthetic_seed;
    datasets.push_back({"synthetic", simulate_dataset(spec)});
    out << "data: synthetic seed=" << spec.seed << " rows=" << spec.n_rows << " features=" << spec.n_features << '\n';
  }
  if (datasets.empty()) throw Error(ErrorCode::kInvalidArgument, "evaluate needs --in and/or --synthetic");

  const std::vector<Method> methods = parse_method_list(e.methods);
  Method baseline = methods.front();
  if (!e.baseline.empty()) {
    baseline = parse_method(e.baseline);
  } else if (std::find(methods.begin(), methods.end(), Method::kGRFRF) != methods.end()) {
    baseline = Method::kGRFRF;
  }

  SplitPlan plan;
  plan.replicate_count = e.replicates;
  std::tie(plan.train_numerator, plan.train_denominator) = parse_fraction(e.train_fraction);
  plan.stratified = !e.unstratified;
  plan.base_seed = o.seed;
  plan.validate();

  HarnessConfig hc;
  hc.forest = forest_config(o);
  hc.grf_gamma = o.gamma.value_or(kDefaultGrfGamma);
  hc.grrf_gamma = e.grrf_gamma;
  hc.parallel_replicates = e.parallel_replicates;

  out << "config: methods=" << e.methods << " baseline=" << method_name(baseline) << " replicates="
      << plan.replicate_count << " train_fraction=" << plan.train_numerator << "/" << plan.train_denominator
      << " stratified=" << (plan.stratified ? 1 : 0) << " base_seed=" << plan.base_seed
      << " trees=" << hc.forest.n_trees << " grf_gamma=" << format_double(hc.grf_gamma)
      << " grrf_gamma=" << format_double(hc.grrf_gamma) << " mtry=" << (o.mtry ? std::to_string(o.mtry) : "auto")
      << " workers=" << hc.forest.resolved_workers() << '\n';

  const EvalReport report = run_benchmark(datasets, methods, plan, baseline, hc);
  const std::string text = text_report(report);
  out << '\n' << text;
  if (!o.out.empty()) {
    open_out(o.out) << text;
    out << "wrote " << o.out << '\n';
  }
  if (!e.csv_out.empty()) {
    auto f = open_out(e.csv_out);
    write_csv_report(f, report);
    out << "wrote " << e.csv_out << '\n';
  }
  for (const auto& ds : report.datasets) {
    if (ds.failed) return 1;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Guided random forest feature selection"};
  app.require_subcommand(1);

  CommonOptions common;

  SyntheticSpec spec;
  std::vector<std::size_t> relevant{0, 20};
  auto* simulate = app.add_subcommand("simulate", "Write the two-relevant-feature synthetic dataset as CSV");
  simulate->add_option("--seed", spec.seed, "Generator seed");
  simulate->add_option("--rows", spec.n_rows, "Number of rows");
  simulate->add_option("--features", spec.n_features, "Number of features");
  simulate->add_option("--relevant", relevant, "The two relevant feature indices")->expected(2)->delimiter(',');
  simulate->add_option("--out", common.out, "Output CSV path")->required();

  std::string in_path;
  std::string weights_path;
  auto* train = app.add_subcommand("train", "Fit an RF / GRF / RRF / GRRF model and write the model file");
  train->add_option("--in", in_path, "Training CSV")->required();
  train->add_option("--mode", common.mode, "rf, grf, rrf or grrf");
  train->add_option("--weights", weights_path, "Per-feature lambda file (one value per line)");
  train->add_option("--rrf-lambda", common.rrf_lambda, "Constant lambda for RRF");
  train->add_option("--label-col", common.label_col, "Label column name or 0-based index (default: last)");
  train->add_option("--out", common.out, "Model output path")->required();
  add_forest_flags(train, common);

  std::string variant = "grf";
  std::string lambda_out;
  auto* select = app.add_subcommand("select", "Run guided feature selection and write the selected indices");
  select->add_option("--in", in_path, "Training CSV")->required();
  select->add_option("--variant", variant, "grf, grrf or custom");
  select->add_option("--weights", weights_path, "Lambda file for --variant custom");
  select->add_option("--lambda-out", lambda_out, "Write the lambda vector used");
  select->add_option("--label-col", common.label_col, "Label column name or 0-based index (default: last)");
  select->add_option("--out", common.out, "Selected feature list output")->required();
  add_forest_flags(select, common);

  std::string model_path;
  bool no_labels = false;
  auto* predict_cmd = app.add_subcommand("predict", "Predict classes for a CSV with a saved model");
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--in", in_path, "Input CSV")->required();
  predict_cmd->add_option("--label-col", common.label_col, "Label column name or 0-based index (default: last)");
  predict_cmd->add_flag("--no-labels", no_labels, "Input has feature columns only");
  predict_cmd->add_option("--out", common.out, "Prediction output (default: stdout)");
  predict_cmd->add_option("--workers", common.workers, "Ignored; accepted for symmetry");

  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "Replicated train/test benchmark with paired t-tests");
  evaluate->add_option("--in", eval.inputs, "Dataset CSV (repeatable)");
  evaluate->add_flag("--synthetic", eval.synthetic, "Include the 500x500 synthetic dataset");
  evaluate->add_option("--synthetic-seed", eval.synthetic_seed, "Seed of the synthetic dataset");
  evaluate->add_option("--methods", eval.methods, "Comma list of rf,grf,grf-rf,grrf,grrf-rf,rrf");
  evaluate->add_option("--baseline", eval.baseline, "Method the others are compared with (default grf-rf)");
  evaluate->add_option("--replicates", eval.replicates, "Number of train/test splits")->check(CLI::PositiveNumber);
  evaluate->add_option("--train-fraction", eval.train_fraction, "Train share, e.g. 2/3 or 0.5");
  evaluate->add_flag("--unstratified", eval.unstratified, "Draw splits without stratifying by class");
  evaluate->add_option("--grrf-gamma", eval.grrf_gamma, "Gamma for GRRF / GRRF-RF");
  evaluate->add_flag("--parallel-replicates", eval.parallel_replicates, "Run replicates concurrently");
  evaluate->add_option("--mode", common.mode, "Ignored; methods are chosen with --methods");
  evaluate->add_option("--label-col", common.label_col, "Label column name or 0-based index (default: last)");
  evaluate->add_option("--out", common.out, "Text report output");
  evaluate->add_option("--csv-out", eval.csv_out, "Per-replicate CSV output");
  add_forest_flags(evaluate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << app.help();
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    if (*simulate) {
      spec.relevant_a = relevant.at(0);
      spec.relevant_b = relevant.at(1);
      return cmd_simulate(out, spec, common.out);
    }
    if (*train) return cmd_train(out, common, in_path, weights_path);
    if (*select) return cmd_select(out, common, in_path, variant, weights_path, lambda_out);
    if (*predict_cmd) return cmd_predict(out, model_path, in_path, common.label_col, common.out, no_labels);
    if (*evaluate) return cmd_evaluate(out, common, eval);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace grf
