// Acceptance suite: one PASS/FAIL line per criterion.
//
//   grf_acceptance [--only N]... [--update-golden]
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "grf/harness.hpp"
#include "grf/model_io.hpp"
#include "grf/pipeline.hpp"
#include "grf/stats.hpp"
#include "grf/synthetic.hpp"
#include "split_oracle.hpp"

using namespace grf;

namespace {

// Tolerances and sizes.
constexpr int kOracleMatricesPerShape = 6;
constexpr int kIdentityDatasets = 5;
constexpr int kParallelTrials = 10;
constexpr int kMinParallelWorkers = 8;
constexpr int kExclusionSeeds = 20;
constexpr std::size_t kConstantColumns = 120;
constexpr std::size_t kReplicationReplicates = 100;
constexpr std::size_t kReplicationTrees = 500;
constexpr double kReplicationAlpha = 0.05;
constexpr int kRecoverySeeds = 100;
constexpr int kRecoveryRequired = 95;
constexpr std::size_t kRecoveryTrees = 500;
constexpr int kTTestPairs = 100;
constexpr double kTTestTolerance = 1e-6;
constexpr double kScaleFactor = 7.3;
constexpr double kLambdaTolerance = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool update_golden = false;

Dataset small_synthetic(std::uint64_t seed, std::size_t rows, std::size_t features, std::size_t relevant_b) {
  SyntheticSpec spec;
  spec.n_rows = rows;
  spec.n_features = features;
  spec.relevant_b = relevant_b;
  spec.seed = seed;
  return simulate_dataset(spec);
}

Outcome split_oracle() {
  const auto r = testing::sweep_split_oracle(kOracleMatricesPerShape, 20240601);
  std::ostringstream d;
  d << r.mismatches << " mismatches in " << r.cases << " cases";
  return {r.mismatches == 0 && r.cases > 0, d.str()};
}

Outcome gamma_zero_identity() {
  int identical = 0;
  for (int i = 0; i < kIdentityDatasets; ++i) {
    const auto seed = static_cast<std::uint64_t>(100 + i);
    const Dataset d = small_synthetic(seed, 60 + 20 * static_cast<std::size_t>(i), 30, 11);
    ForestConfig cfg;
    cfg.n_trees = 50;
    cfg.master_seed = seed;
    const Forest rf = build_forest(d, cfg);
    const auto lambda = compute_lambda(normalize_importance(importance(rf)), 0.0);
    ForestConfig g = cfg;
    g.mode = ForestMode::kGRF;
    g.gamma = 0.0;
    const Forest grf = build_forest(d, g, lambda);
    identical += serialize_trees(grf) == serialize_trees(rf) ? 1 : 0;
  }
  return {identical == kIdentityDatasets,
          std::to_string(identical) + "/" + std::to_string(kIdentityDatasets) + " datasets bit-identical"};
}

Outcome parallel_determinism() {
  const int max_workers =
      std::max(kMinParallelWorkers, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  int identical = 0;
  for (int trial = 0; trial < kParallelTrials; ++trial) {
    const auto seed = static_cast<std::uint64_t>(500 + trial);
    const Dataset d = small_synthetic(seed, 120, 60, 20);
    ForestConfig cfg;
    cfg.n_trees = 64;
    cfg.mode = ForestMode::kGRF;
    cfg.master_seed = seed;
    ForestConfig guide = cfg;
    guide.mode = ForestMode::kRF;
    const auto lambda = compute_lambda(normalize_importance(importance(build_forest(d, guide))), 1.0);
    cfg.workers = 1;
    const std::string one = serialize_forest(build_forest(d, cfg, lambda));
    cfg.workers = max_workers;
    const std::string many = serialize_forest(build_forest(d, cfg, lambda));
    identical += one == many ? 1 : 0;
  }
  return {identical == kParallelTrials, std::to_string(identical) + "/" + std::to_string(kParallelTrials) +
                                            " trials identical (1 vs " + std::to_string(max_workers) + " workers)"};
}

Outcome zero_importance_exclusion() {
  int violations = 0;
  std::size_t zero_features = 0;
  for (int s = 0; s < kExclusionSeeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(900 + s);
    Dataset d = small_synthetic(seed, 200, 60, 20);
    // Append constant columns, which can never split.
    Dataset wide;
    wide.n_rows = d.n_rows;
    wide.n_features = d.n_features + kConstantColumns;
    wide.n_classes = d.n_classes;
    wide.labels = d.labels;
    wide.class_names = d.class_names;
    for (std::size_t r = 0; r < d.n_rows; ++r) {
      const auto row = d.row(r);
      wide.values.insert(wide.values.end(), row.begin(), row.end());
      for (std::size_t c = 0; c < kConstantColumns; ++c) wide.values.push_back(0.25 * static_cast<double>(c % 4));
    }
    ForestConfig cfg;
    cfg.n_trees = 200;
    cfg.master_seed = seed;
    const SelectionRun run = run_guided_selection(wide, 1.0, ForestMode::kGRF, cfg);
    const auto& imp = run.result.guide_importance.raw;
    for (double v : imp) zero_features += v == 0.0 ? 1 : 0;
    for (const auto& tree : run.selector.trees) {
      for (const auto& node : tree.nodes) {
        if (!node.is_leaf() && imp[node.split->feature] == 0.0) ++violations;
      }
    }
  }
  std::ostringstream d;
  d << violations << " splits on zero-importance features over " << kExclusionSeeds << " seeds ("
    << zero_features << " zero-importance feature slots)";
  return {violations == 0 && zero_features >= kConstantColumns * kExclusionSeeds, d.str()};
}

Outcome synthetic_replication() {
  SyntheticSpec spec;
  spec.seed = 1;
  const std::vector<NamedDataset> datasets{{"synthetic", simulate_dataset(spec)}};
  SplitPlan plan;
  plan.replicate_count = kReplicationReplicates;
  plan.train_numerator = 1;
  plan.train_denominator = 2;
  plan.base_seed = 1;
  HarnessConfig hc;
  hc.forest.n_trees = kReplicationTrees;
  const EvalReport report = run_benchmark(datasets, {Method::kGRFRF, Method::kRF}, plan, Method::kGRFRF, hc);
  const DatasetReport& ds = report.datasets.front();
  if (ds.failed) return {false, "benchmark failed: " + ds.failure};
  const MethodResult& grf_rf = ds.methods[0];
  const MethodResult& rf = ds.methods[1];
  const TTestResult tt = paired_t_test(grf_rf.errors, rf.errors);
  const bool pass = grf_rf.mean_error < rf.mean_error && tt.p_value < kReplicationAlpha &&
                    grf_rf.mean_features < rf.mean_features;
  std::ostringstream d;
  d << "mean error GRF-RF " << grf_rf.mean_error << " vs RF " << rf.mean_error << ", p " << tt.p_value
    << "; mean features GRF " << grf_rf.mean_features << " vs RF " << rf.mean_features;
  return {pass, d.str()};
}

Outcome relevant_feature_recovery() {
  int hits = 0;
  double selected = 0.0;
  for (int s = 1; s <= kRecoverySeeds; ++s) {
    SyntheticSpec spec;
    spec.seed = static_cast<std::uint64_t>(s);
    const Dataset d = simulate_dataset(spec);
    ForestConfig cfg;
    cfg.n_trees = kRecoveryTrees;
    cfg.master_seed = static_cast<std::uint64_t>(s);
    const auto sel = grf_select(d, 1.0, cfg).selected_features;
    selected += static_cast<double>(sel.size());
    hits += std::binary_search(sel.begin(), sel.end(), 0) && std::binary_search(sel.begin(), sel.end(), 20) ? 1 : 0;
  }
  std::ostringstream d;
  d << "features 0 and 20 selected in " << hits << "/" << kRecoverySeeds << " seeds (mean |selected| "
    << selected / kRecoverySeeds << ")";
  return {hits >= kRecoveryRequired, d.str()};
}

Outcome t_test_oracle() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> shift(-0.8, 0.8);
  const std::size_t sizes[] = {5, 30, 100};
  double worst = 0.0;
  for (int i = 0; i < kTTestPairs; ++i) {
    const std::size_t n = sizes[i % 3];
    const double delta = shift(rng);
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = noise(rng);
      b[k] = a[k] + delta + 0.7 * noise(rng);
    }
    const TTestResult ours = paired_t_test(a, b);
    std::vector<double> diff(n);
    for (std::size_t k = 0; k < n; ++k) diff[k] = a[k] - b[k];
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : diff) ss += (v - mean) * (v - mean);
    const double t = mean / std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    worst = std::max(worst, std::abs(ours.p_value - p));
  }
  std::ostringstream d;
  d << "max |dp| " << worst << " over " << kTTestPairs << " pairs";
  return {worst <= kTTestTolerance, d.str()};
}

Outcome scaling_invariance() {
  SyntheticSpec spec;
  spec.n_rows = 250;
  spec.seed = 3;
  const Dataset d = simulate_dataset(spec);
  ForestConfig cfg;
  cfg.n_trees = 300;
  cfg.master_seed = 3;
  const ImportanceVector imp = importance(build_guide_forest(d, cfg));
  std::vector<double> scaled = imp.raw;
  for (auto& v : scaled) v *= kScaleFactor;
  const SelectionRun a = select_from_importance(d, imp, 1.0, ForestMode::kGRF, cfg);
  const SelectionRun b = select_from_importance(d, ImportanceVector::from_raw(scaled), 1.0, ForestMode::kGRF, cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.result.weights.size(); ++i) {
    worst = std::max(worst, std::abs(a.result.weights.lambda[i] - b.result.weights.lambda[i]));
  }
  const bool same = a.result.selected_features == b.result.selected_features;
  std::ostringstream detail;
  detail << "max |dlambda| " << worst << ", selected sets " << (same ? "identical" : "differ") << " ("
    << a.result.selected_features.size() << " features)";
  return {worst <= kLambdaTolerance && same, detail.str()};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome report_format() {
  const Dataset d = small_synthetic(1, 90, 40, 20);
  const std::vector<NamedDataset> datasets{{"synthetic", d}, {"synthetic.b", small_synthetic(2, 75, 30, 9)}};
  SplitPlan plan;
  plan.replicate_count = 6;
  plan.base_seed = 5;
  HarnessConfig hc;
  hc.forest.n_trees = 25;
  const std::vector<Method> methods{Method::kGRFRF, Method::kGRF, Method::kRF, Method::kGRRF, Method::kGRRFRF};
  const EvalReport report = run_benchmark(datasets, methods, plan, Method::kGRFRF, hc);
  const std::string text = text_report(report);
  std::ostringstream csv;
  write_csv_report(csv, report);

  const std::filesystem::path dir(GRF_GOLDEN_DIR);
  const auto text_path = dir / "report.txt";
  const auto csv_path = dir / "report.csv";
  if (update_golden) {
    std::ofstream(text_path, std::ios::binary) << text;
    std::ofstream(csv_path, std::ios::binary) << csv.str();
  }
  const bool text_ok = read_file(text_path) == text;
  const bool csv_ok = read_file(csv_path) == csv.str();
  const bool has_tables = text.find("win-lose-tie") != std::string::npos &&
                          text.find("p-values") != std::string::npos &&
                          text.find("instances  classes  features") != std::string::npos;
  std::ostringstream detail;
  detail << "text " << (text_ok ? "matches" : "differs from") << " golden, csv " << (csv_ok ? "matches" : "differs from")
         << " golden, tables " << (has_tables ? "present" : "missing");
  return {text_ok && csv_ok && has_tables, detail.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--update-golden") {
      update_golden = true;
    } else if (arg == "--only" && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: grf_acceptance [--only N]... [--update-golden]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "split oracle equivalence", split_oracle},
      {2, "gamma 0 GRF equals RF", gamma_zero_identity},
      {3, "parallel determinism", parallel_determinism},
      {4, "zero-importance exclusion", zero_importance_exclusion},
      {5, "synthetic replication (GRF-RF vs RF)", synthetic_replication},
      {6, "relevant-feature recovery", relevant_feature_recovery},
      {7, "t-test reference match", t_test_oracle},
      {8, "importance scaling invariance", scaling_invariance},
      {9, "report format golden files", report_format},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << o.detail
              << "; " << std::fixed << std::setprecision(1) << secs << "s]" << std::defaultfloat << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
