#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "grf/error.hpp"
#include "grf/harness.hpp"
#include "grf/synthetic.hpp"

using namespace grf;

namespace {

Dataset balanced(std::size_t per_class, int n_classes = 2) {
  Dataset d;
  d.n_features = 2;
  d.n_classes = n_classes;
  for (int c = 0; c < n_classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int c = 0; c < n_classes; ++c) {
      d.values.push_back(static_cast<double>(i));
      d.values.push_back(static_cast<double>(c));
      d.labels.push_back(c);
      ++d.n_rows;
    }
  }
  return d;
}

HarnessConfig quick(std::size_t trees = 20) {
  HarnessConfig hc;
  hc.forest.n_trees = trees;
  return hc;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(method_name(Method::kGRFRF) == "GRF-RF");
  CHECK(parse_method("grrf-rf") == Method::kGRRFRF);
  CHECK(parse_method("RF") == Method::kRF);
  CHECK(parse_method_list("rf, grf-rf") == std::vector<Method>{Method::kRF, Method::kGRFRF});
  CHECK_THROWS_AS(parse_method("svm"), Error);
}

TEST_CASE("stratified split sizes") {
  const Dataset d = balanced(9);
  SplitPlan plan;
  const auto s = split_train_test(d, plan, 0);
  CHECK(s.train_rows.size() == 12);
  CHECK(s.test_rows.size() == 6);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::count(s.train.labels.begin(), s.train.labels.end(), c) == 6);
    CHECK(std::count(s.test.labels.begin(), s.test.labels.end(), c) == 3);
  }
}

TEST_CASE("splits are deterministic partitions") {
  SyntheticSpec spec;
  spec.n_rows = 101;
  spec.n_features = 30;
  const Dataset d = simulate_dataset(spec);
  for (bool stratified : {true, false}) {
    SplitPlan plan;
    plan.stratified = stratified;
    plan.base_seed = 17;
    for (std::size_t rep = 0; rep < 10; ++rep) {
      const auto a = split_train_test(d, plan, rep);
      const auto b = split_train_test(d, plan, rep);
      CHECK(a.train_rows == b.train_rows);
      CHECK(a.test_rows == b.test_rows);
      CHECK(std::is_sorted(a.train_rows.begin(), a.train_rows.end()));
      std::vector<std::size_t> all = a.train_rows;
      all.insert(all.end(), a.test_rows.begin(), a.test_rows.end());
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expected(d.n_rows);
      std::iota(expected.begin(), expected.end(), std::size_t{0});
      CHECK(all == expected);
      for (std::size_t i = 0; i < a.train_rows.size(); ++i) {
        CHECK(a.train.labels[i] == d.labels[a.train_rows[i]]);
      }
      if (stratified) {
        for (int c = 0; c < 2; ++c) {
          const auto n_class = std::count(d.labels.begin(), d.labels.end(), c);
          const auto n_train = std::count(a.train.labels.begin(), a.train.labels.end(), c);
          CHECK(std::abs(static_cast<double>(n_train) - static_cast<double>(n_class) * 2.0 / 3.0) <= 1.0);
        }
      }
    }
    CHECK(split_train_test(d, plan, 0).train_rows != split_train_test(d, plan, 1).train_rows);
  }
}

TEST_CASE("split errors") {
  Dataset d = balanced(5);
  for (std::size_t r = 0; r < d.n_rows; ++r) d.labels[r] = r == 3 ? 1 : 0;
  try {
    split_train_test(d, SplitPlan{}, 0);
    FAIL("expected class-too-small");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kClassTooSmall);
  }
  SplitPlan bad;
  bad.train_numerator = 3;
  bad.train_denominator = 3;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("error rate") {
  const std::vector<int> a{0, 1, 1, 0};
  CHECK(error_rate(a, a) == 0.0);
  CHECK(error_rate(a, std::vector<int>{1, 0, 0, 1}) == 1.0);
  std::vector<int> truth(250, 0), pred(250, 0);
  for (int i = 0; i < 34; ++i) pred[static_cast<std::size_t>(i * 7)] = 1;
  CHECK(error_rate(pred, truth) == doctest::Approx(0.136).epsilon(1e-12));
  try {
    error_rate(a, std::vector<int>{0});
    FAIL("expected length-mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
  }
  try {
    error_rate(std::vector<int>{}, std::vector<int>{});
    FAIL("expected empty-input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyInput);
  }
}

TEST_CASE("benchmark bookkeeping") {
  SyntheticSpec spec;
  spec.n_rows = 60;
  spec.n_features = 25;
  spec.relevant_b = 7;
  const Dataset d = simulate_dataset(spec);
  SplitPlan plan;
  plan.replicate_count = 4;
  const std::vector<Method> methods{Method::kGRFRF, Method::kRF, Method::kGRF, Method::kGRRF};
  const auto report = run_benchmark({{"syn", d}}, methods, plan, Method::kGRFRF, quick());
  REQUIRE(report.datasets.size() == 1);
  const auto& ds = report.datasets[0];
  CHECK_FALSE(ds.failed);
  REQUIRE(ds.methods.size() == methods.size());
  for (const auto& m : ds.methods) {
    REQUIRE(m.errors.size() == 4);
    const double mean = std::accumulate(m.errors.begin(), m.errors.end(), 0.0) / 4.0;
    CHECK(std::abs(mean - m.mean_error) <= 1e-12);
    for (double e : m.errors) CHECK((e >= 0.0 && e <= 1.0));
    CHECK((m.p_value >= 0.0 && m.p_value <= 1.0));
    for (double f : m.features_used) CHECK((f >= 1.0 && f <= 25.0));
  }
  CHECK(ds.methods[0].p_value == 1.0);
  CHECK(ds.methods[0].mark == Mark::kNone);
  for (const auto& t : report.tallies) CHECK(t.win + t.lose + t.tie == 1);

  const auto again = run_benchmark({{"syn", d}}, methods, plan, Method::kGRFRF, quick());
  CHECK(again.datasets[0].methods[1].errors == ds.methods[1].errors);

  HarnessConfig par = quick();
  par.parallel_replicates = true;
  const auto parallel = run_benchmark({{"syn", d}}, methods, plan, Method::kGRFRF, par);
  for (std::size_t i = 0; i < methods.size(); ++i) {
    CHECK(parallel.datasets[0].methods[i].errors == ds.methods[i].errors);
    CHECK(parallel.datasets[0].methods[i].features_used == ds.methods[i].features_used);
  }
}

TEST_CASE("a method compared with itself ties everywhere") {
  SyntheticSpec spec;
  spec.n_rows = 45;
  spec.n_features = 10;
  spec.relevant_b = 3;
  std::vector<NamedDataset> sets;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    spec.seed = s;
    sets.push_back({"d" + std::to_string(s), simulate_dataset(spec)});
  }
  SplitPlan plan;
  plan.replicate_count = 3;
  const auto report = run_benchmark(sets, {Method::kRF, Method::kRF}, plan, Method::kRF, quick(10));
  for (const auto& ds : report.datasets) {
    for (const auto& m : ds.methods) CHECK(m.p_value == 1.0);
  }
  for (const auto& t : report.tallies) {
    CHECK(t.tie == 3);
    CHECK(t.win + t.lose == 0);
  }
}

TEST_CASE("failed datasets do not abort the run") {
  SyntheticSpec spec;
  spec.n_rows = 40;
  spec.n_features = 10;
  spec.relevant_b = 3;
  Dataset tiny = balanced(1);
  SplitPlan plan;
  plan.replicate_count = 2;
  const auto report = run_benchmark({{"bad", tiny}, {"good", simulate_dataset(spec)}},
                                    {Method::kGRFRF, Method::kRF}, plan, Method::kGRFRF, quick(10));
  CHECK(report.datasets[0].failed);
  CHECK(report.datasets[0].failure.find("class-too-small") != std::string::npos);
  CHECK_FALSE(report.datasets[1].failed);
  for (const auto& t : report.tallies) CHECK(t.win + t.lose + t.tie == 1);
  const std::string text = text_report(report);
  CHECK(text.find("bad") != std::string::npos);
}

TEST_CASE("tallies count significant differences") {
  auto dataset = [](Mark other, bool failed = false) {
    DatasetReport ds;
    ds.failed = failed;
    ds.methods.resize(2);
    ds.methods[1].mark = other;
    return ds;
  };
  const std::vector<DatasetReport> lost{dataset(Mark::kLower), dataset(Mark::kLower), dataset(Mark::kLower)};
  auto t = tally_marks(lost, 2);
  CHECK(t[1].win == 3);
  CHECK(t[1].lose == 0);
  CHECK(t[1].tie == 0);
  CHECK(t[0].tie == 3);

  const std::vector<DatasetReport> mixed{dataset(Mark::kLower), dataset(Mark::kHigher), dataset(Mark::kNone),
                                         dataset(Mark::kHigher, true)};
  t = tally_marks(mixed, 2);
  CHECK(t[1].win == 1);
  CHECK(t[1].lose == 1);
  CHECK(t[1].tie == 1);
}

TEST_CASE("csv report") {
  SyntheticSpec spec;
  spec.n_rows = 40;
  spec.n_features = 10;
  spec.relevant_b = 3;
  SplitPlan plan;
  plan.replicate_count = 2;
  const auto report =
      run_benchmark({{"syn", simulate_dataset(spec)}}, {Method::kGRFRF, Method::kRF}, plan, Method::kGRFRF, quick(5));
  std::ostringstream csv;
  write_csv_report(csv, report);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "dataset,method,replicate,error,n_features_used,seed");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.rfind("syn,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
  }
  CHECK(rows == 4);
}
