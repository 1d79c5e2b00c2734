#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grf/dataset.hpp"
#include "grf/forest.hpp"

namespace grf {

enum class Method { kRF, kGRF, kGRFRF, kGRRF, kGRRFRF, kRRF };

std::string_view method_name(Method m);  // "RF", "GRF-RF", ...
Method parse_method(std::string_view name);  // case-insensitive
std::vector<Method> parse_method_list(std::string_view csv);

struct SplitPlan {
  std::size_t replicate_count = 100;
  std::size_t train_numerator = 2;  // train fraction as a rational
  std::size_t train_denominator = 3;
  bool stratified = true;
  std::uint64_t base_seed = 1;

  void validate() const;
};

struct TrainTestSplit {
  std::vector<std::size_t> train_rows;  // ascending
  std::vector<std::size_t> test_rows;   // ascending
  Dataset train;
  Dataset test;
};

// Deterministic per (plan.base_seed, replicate_index). Stratified splits give
// each class round(n_class * fraction) training rows, clamped so both sides
// keep at least one row of every class. Throws class-too-small when a class
// has fewer than 2 rows.
TrainTestSplit split_train_test(const Dataset& data, const SplitPlan& plan, std::size_t replicate_index);

// Fraction of mismatches. Throws length-mismatch or empty-input.
double error_rate(std::span<const int> predicted, std::span<const int> actual);

struct HarnessConfig {
  ForestConfig forest;  // n_trees, mtry, workers, ... (master_seed is derived per replicate)
  double grf_gamma = 1.0;
  double grrf_gamma = 0.1;
  bool parallel_replicates = false;  // run replicates concurrently, one worker per forest
};

struct NamedDataset {
  std::string name;
  Dataset data;
};

// Table 1 marks relative to the baseline at the 0.05 level.
enum class Mark { kNone, kHigher, kLower };

inline constexpr double kSignificanceLevel = 0.05;

struct MethodResult {
  Method method = Method::kRF;
  std::vector<double> errors;         // per replicate
  std::vector<double> features_used;  // per replicate
  std::vector<std::uint64_t> seeds;   // per replicate model master seed
  double mean_error = 0.0;
  double mean_features = 0.0;
  // Versus the baseline (t > 0: this method has the higher error).
  double t_statistic = 0.0;
  double p_value = 1.0;
  Mark mark = Mark::kNone;
};

struct DatasetReport {
  std::string name;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  int n_classes = 0;
  bool failed = false;
  std::string failure;
  std::vector<MethodResult> methods;  // same order as EvalReport::methods
};

struct Tally {
  int win = 0;  // significantly lower error than the baseline
  int lose = 0;
  int tie = 0;
};

struct EvalReport {
  std::vector<Method> methods;
  Method baseline = Method::kGRFRF;
  SplitPlan plan;
  std::vector<DatasetReport> datasets;
  std::vector<Tally> tallies;  // per method, over datasets that did not fail
};

// Every method of a replicate trains on the same split and is scored on the
// same test rows. Errors raised while evaluating a dataset mark that dataset
// failed and the run continues.
EvalReport run_benchmark(const std::vector<NamedDataset>& datasets, const std::vector<Method>& methods,
                         const SplitPlan& plan, Method baseline, const HarnessConfig& config);

// Win-lose-tie per method over the datasets that did not fail.
std::vector<Tally> tally_marks(const std::vector<DatasetReport>& datasets, std::size_t n_methods);

// Table-1-style error table with marks, p-values, win-lose-tie row, and a
// Table-2-style feature-count table.
void write_text_report(std::ostream& os, const EvalReport& report);
std::string text_report(const EvalReport& report);

// dataset,method,replicate,error,n_features_used,seed
void write_csv_report(std::ostream& os, const EvalReport& report);

}  // namespace grf
