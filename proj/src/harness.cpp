#include "grf/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "grf/error.hpp"
#include "grf/model_io.hpp"
#include "grf/pipeline.hpp"
#include "grf/rng.hpp"
#include "grf/stats.hpp"

namespace grf {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kRF: return "RF";
    case Method::kGRF: return "GRF";
    case Method::kGRFRF: return "GRF-RF";
    case Method::kGRRF: return "GRRF";
    case Method::kGRRFRF: return "GRRF-RF";
    case Method::kRRF: return "RRF";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string lower;
  for (char c : name) {
    if (c == '_') c = '-';
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (Method m : {Method::kRF, Method::kGRF, Method::kGRFRF, Method::kGRRF, Method::kGRRFRF, Method::kRRF}) {
    std::string n(method_name(m));
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (n == lower) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view csv) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto end = std::min(csv.find(',', start), csv.size());
    auto token = csv.substr(start, end - start);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
    if (!token.empty()) out.push_back(parse_method(token));
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty method list");
  return out;
}

void SplitPlan::validate() const {
  if (replicate_count < 1) throw Error(ErrorCode::kInvalidArgument, "replicate_count must be >= 1");
  if (train_denominator == 0 || train_numerator == 0 || train_numerator >= train_denominator) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must lie strictly between 0 and 1");
  }
}

namespace {

std::uint64_t split_seed(const SplitPlan& plan, std::size_t replicate) {
  return derive_seed(derive_seed(plan.base_seed, stream::kSplit), replicate);
}

std::uint64_t model_seed(const SplitPlan& plan, std::size_t replicate) {
  return derive_seed(derive_seed(plan.base_seed, stream::kReplicate), replicate);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_index(rng, i))]);
  }
}

std::size_t rounded_share(std::size_t n, const SplitPlan& plan) {
  return (n * plan.train_numerator * 2 + plan.train_denominator) / (2 * plan.train_denominator);
}

}  // namespace

TrainTestSplit split_train_test(const Dataset& data, const SplitPlan& plan, std::size_t replicate_index) {
  plan.validate();
  if (replicate_index >= plan.replicate_count) {
    throw Error(ErrorCode::kInvalidArgument, "replicate index " + std::to_string(replicate_index) +
                                                 " >= replicate count " + std::to_string(plan.replicate_count));
  }
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.n_classes));
  for (std::size_t r = 0; r < data.n_rows; ++r) by_class[static_cast<std::size_t>(data.labels[r])].push_back(r);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < 2) {
      const std::string name = c < data.class_names.size() ? data.class_names[c] : std::to_string(c);
      throw Error(ErrorCode::kClassTooSmall, "class '" + name + "' has " + std::to_string(by_class[c].size()) +
                                                 " rows; at least 2 are needed to split");
    }
  }

  Rng rng = make_rng(split_seed(plan, replicate_index));
  TrainTestSplit split;
  if (plan.stratified) {
    for (auto& rows : by_class) {
      shuffle(rows, rng);
      const std::size_t n_train = std::clamp<std::size_t>(rounded_share(rows.size(), plan), 1, rows.size() - 1);
      split.train_rows.insert(split.train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
      split.test_rows.insert(split.test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
    }
  } else {
    std::vector<std::size_t> rows(data.n_rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    shuffle(rows, rng);
    const std::size_t n_train = std::clamp<std::size_t>(rounded_share(rows.size(), plan), 1, rows.size() - 1);
    split.train_rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(split.train_rows.begin(), split.train_rows.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  split.train = select_rows(data, split.train_rows);
  split.test = select_rows(data, split.test_rows);
  return split;
}

double error_rate(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::kLengthMismatch, "prediction and label sequences differ in length");
  }
  if (predicted.empty()) throw Error(ErrorCode::kEmptyInput, "error rate of an empty sequence");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != actual[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

namespace {

struct Outcome {
  double error = 0.0;
  double features = 0.0;
};

bool needs_guide(Method m) { return m != Method::kRRF; }

// All requested methods on one replicate. Forests shared between methods
// (the guide RF, the GRF/GRRF selectors) are built once.
std::vector<Outcome> run_replicate(const TrainTestSplit& split, const std::vector<Method>& methods,
                                   const HarnessConfig& config, std::uint64_t seed, int workers) {
  ForestConfig fc = config.forest;
  fc.master_seed = seed;
  fc.workers = workers;

  const auto has = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
  std::optional<Forest> guide;
  if (std::any_of(methods.begin(), methods.end(), needs_guide)) guide = build_guide_forest(split.train, fc);
  std::optional<SelectionRun> grf;
  std::optional<SelectionRun> grrf;
  if (has(Method::kGRF) || has(Method::kGRFRF)) {
    grf = run_guided_selection(split.train, config.grf_gamma, ForestMode::kGRF, fc, &*guide);
  }
  if (has(Method::kGRRF) || has(Method::kGRRFRF)) {
    grrf = run_guided_selection(split.train, config.grrf_gamma, ForestMode::kGRRF, fc, &*guide);
  }

  const auto score_forest = [&](const Forest& f) {
    return Outcome{error_rate(predict(f, split.test), split.test.labels),
                   static_cast<double>(feature_set(f).size())};
  };
  const auto score_selected = [&](const SelectionRun& run) {
    SelectedModel model = train_on_selection(split.train, run.result, fc);
    return Outcome{error_rate(model.predict(split.test), split.test.labels),
                   static_cast<double>(run.result.selected_features.size())};
  };

  std::vector<Outcome> out;
  for (Method m : methods) {
    switch (m) {
      case Method::kRF: out.push_back(score_forest(*guide)); break;
      case Method::kGRF: out.push_back(score_forest(grf->selector)); break;
      case Method::kGRFRF: out.push_back(score_selected(*grf)); break;
      case Method::kGRRF: out.push_back(score_forest(grrf->selector)); break;
      case Method::kGRRFRF: out.push_back(score_selected(*grrf)); break;
      case Method::kRRF: {
        ForestConfig rc = fc;
        rc.mode = ForestMode::kRRF;
        out.push_back(score_forest(build_forest(split.train, rc)));
        break;
      }
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

DatasetReport evaluate_dataset(const NamedDataset& named, const std::vector<Method>& methods,
                               const SplitPlan& plan, Method baseline, const HarnessConfig& config) {
  const Dataset& data = named.data;
  DatasetReport report;
  report.name = named.name;
  report.n_rows = data.n_rows;
  report.n_features = data.n_features;
  report.n_classes = data.n_classes;
  for (Method m : methods) {
    MethodResult r;
    r.method = m;
    r.errors.resize(plan.replicate_count);
    r.features_used.resize(plan.replicate_count);
    r.seeds.resize(plan.replicate_count);
    report.methods.push_back(std::move(r));
  }

  try {
    data.validate();
    const auto n_rep = static_cast<std::int64_t>(plan.replicate_count);
    std::vector<std::vector<Outcome>> outcomes(plan.replicate_count);
    std::exception_ptr failure;
    const int forest_workers = config.parallel_replicates ? 1 : config.forest.workers;
#pragma omp parallel for schedule(dynamic, 1) if (config.parallel_replicates) \
    num_threads(config.forest.resolved_workers())
    for (std::int64_t i = 0; i < n_rep; ++i) {
      const auto rep = static_cast<std::size_t>(i);
      try {
        const TrainTestSplit split = split_train_test(data, plan, rep);
        outcomes[rep] = run_replicate(split, methods, config, model_seed(plan, rep), forest_workers);
      } catch (...) {
#pragma omp critical(grf_harness_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t rep = 0; rep < plan.replicate_count; ++rep) {
      for (std::size_t k = 0; k < methods.size(); ++k) {
        report.methods[k].errors[rep] = outcomes[rep][k].error;
        report.methods[k].features_used[rep] = outcomes[rep][k].features;
        report.methods[k].seeds[rep] = model_seed(plan, rep);
      }
    }
    const auto base_it = std::find(methods.begin(), methods.end(), baseline);
    const auto& base = report.methods[static_cast<std::size_t>(base_it - methods.begin())];
    for (auto& r : report.methods) {
      r.mean_error = mean(r.errors);
      r.mean_features = mean(r.features_used);
      if (plan.replicate_count >= 2) {
        const TTestResult tt = paired_t_test(r.errors, base.errors);
        r.t_statistic = tt.t_statistic;
        r.p_value = tt.p_value;
      } else {
        r.t_statistic = 0.0;
        r.p_value = 1.0;
      }
      r.mark = Mark::kNone;
      if (r.p_value < kSignificanceLevel) r.mark = r.t_statistic > 0.0 ? Mark::kHigher : Mark::kLower;
    }
  } catch (const std::exception& e) {
    report.failed = true;
    report.failure = e.what();
  }
  return report;
}

}  // namespace

EvalReport run_benchmark(const std::vector<NamedDataset>& datasets, const std::vector<Method>& methods,
                         const SplitPlan& plan, Method baseline, const HarnessConfig& config) {
  plan.validate();
  if (datasets.empty()) throw Error(ErrorCode::kInvalidArgument, "no datasets to evaluate");
  if (methods.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two methods to compare");
  if (std::find(methods.begin(), methods.end(), baseline) == methods.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "baseline " + std::string(method_name(baseline)) + " is not among the methods");
  }
  EvalReport report;
  report.methods = methods;
  report.baseline = baseline;
  report.plan = plan;
  for (const auto& named : datasets) {
    report.datasets.push_back(evaluate_dataset(named, methods, plan, baseline, config));
  }
  report.tallies = tally_marks(report.datasets, methods.size());
  return report;
}

std::vector<Tally> tally_marks(const std::vector<DatasetReport>& datasets, std::size_t n_methods) {
  std::vector<Tally> tallies(n_methods);
  for (const auto& ds : datasets) {
    if (ds.failed) continue;
    for (std::size_t k = 0; k < n_methods; ++k) {
      switch (ds.methods[k].mark) {
        case Mark::kLower: ++tallies[k].win; break;
        case Mark::kHigher: ++tallies[k].lose; break;
        case Mark::kNone: ++tallies[k].tie; break;
      }
    }
  }
  return tallies;
}

namespace {

std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80 ? 1 : 0;
  return w;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string_view mark_symbol(Mark m) {
  switch (m) {
    case Mark::kHigher: return "∘";
    case Mark::kLower: return "•";
    case Mark::kNone: break;
  }
  return "";
}

void print_table(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], display_width(row[c]));
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      const std::size_t pad = widths[c] - display_width(row[c]);
      if (c == 0) {
        line += row[c] + std::string(pad, ' ');
      } else {
        line += std::string(pad, ' ') + row[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
}

std::string fraction_text(const SplitPlan& plan) {
  return std::to_string(plan.train_numerator) + "/" + std::to_string(plan.train_denominator);
}

}  // namespace

void write_text_report(std::ostream& os, const EvalReport& report) {
  const auto& methods = report.methods;
  const std::string base(method_name(report.baseline));
  os << "Error rates averaged over " << report.plan.replicate_count << " replicates (train fraction "
     << fraction_text(report.plan) << (report.plan.stratified ? ", stratified" : ", unstratified") << ")\n";
  os << "∘ / •: significantly higher / lower error than " << base
     << " (paired t-test, 0.05 level)\n";
  os << "win-lose-tie: datasets where the method's error is significantly lower / higher / not different\n\n";

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"dataset"};
  for (Method m : methods) {
    header.emplace_back(method_name(m));
    header.emplace_back("");
  }
  rows.push_back(header);
  for (const auto& ds : report.datasets) {
    std::vector<std::string> row{ds.name};
    for (std::size_t k = 0; k < methods.size(); ++k) {
      if (ds.failed) {
        row.emplace_back("failed");
        row.emplace_back("");
      } else {
        row.push_back(fixed(ds.methods[k].mean_error, 3));
        row.emplace_back(methods[k] == report.baseline ? "" : std::string(mark_symbol(ds.methods[k].mark)));
      }
    }
    rows.push_back(row);
  }
  std::vector<std::string> tally_row{"win-lose-tie"};
  for (std::size_t k = 0; k < methods.size(); ++k) {
    if (methods[k] == report.baseline) {
      tally_row.emplace_back("-");
    } else {
      const Tally& t = report.tallies[k];
      tally_row.push_back(std::to_string(t.win) + "-" + std::to_string(t.lose) + "-" + std::to_string(t.tie));
    }
    tally_row.emplace_back("");
  }
  rows.push_back(tally_row);
  print_table(os, rows);

  os << "\nPaired t-test p-values versus " << base << "\n\n";
  rows.clear();
  header.assign({"dataset"});
  for (Method m : methods) {
    if (m != report.baseline) header.emplace_back(method_name(m));
  }
  rows.push_back(header);
  for (const auto& ds : report.datasets) {
    std::vector<std::string> row{ds.name};
    for (std::size_t k = 0; k < methods.size(); ++k) {
      if (methods[k] == report.baseline) continue;
      row.push_back(ds.failed ? "-" : fixed(ds.methods[k].p_value, 4));
    }
    rows.push_back(row);
  }
  print_table(os, rows);

  os << "\nMean number of features used\n\n";
  rows.clear();
  header.assign({"dataset", "instances", "classes", "features"});
  for (Method m : methods) header.emplace_back(method_name(m));
  rows.push_back(header);
  for (const auto& ds : report.datasets) {
    std::vector<std::string> row{ds.name, std::to_string(ds.n_rows), std::to_string(ds.n_classes),
                                 std::to_string(ds.n_features)};
    for (std::size_t k = 0; k < methods.size(); ++k) {
      row.push_back(ds.failed ? "-" : fixed(ds.methods[k].mean_features, 1));
    }
    rows.push_back(row);
  }
  print_table(os, rows);

  for (const auto& ds : report.datasets) {
    if (ds.failed) os << "\nFAILED " << ds.name << ": " << ds.failure << '\n';
  }
}

std::string text_report(const EvalReport& report) {
  std::ostringstream os;
  write_text_report(os, report);
  return os.str();
}

void write_csv_report(std::ostream& os, const EvalReport& report) {
  os << "dataset,method,replicate,error,n_features_used,seed\n";
  for (const auto& ds : report.datasets) {
    if (ds.failed) continue;
    for (const auto& r : ds.methods) {
      for (std::size_t i = 0; i < r.errors.size(); ++i) {
        os << ds.name << ',' << method_name(r.method) << ',' << i << ',' << format_double(r.errors[i]) << ','
           << format_double(r.features_used[i]) << ',' << r.seeds[i] << '\n';
      }
    }
  }
}

}  // namespace grf
