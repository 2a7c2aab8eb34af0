#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "pcm/errors.hpp"
#include "pcm/experiment.hpp"
#include "pcm/moments.hpp"

using namespace pcm;

namespace {

struct Setup {
  std::shared_ptr<const Vtree> vtree;
  Circuit pc;
  Circuit rc;
  DatasetTable test;
  DatasetTable train;
};

// Factorized ground truth with a linear target; train/test drawn from it.
Setup make_setup(int n_features, int train_rows, int test_rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> marginals;
  for (int i = 0; i < n_features; ++i)
    marginals.push_back(std::uniform_real_distribution<double>(0.15, 0.85)(rng));
  LinearModel lm;
  lm.bias = 0.5;
  for (int i = 0; i < n_features; ++i)
    lm.weights.push_back(std::uniform_real_distribution<double>(-2.0, 2.0)(rng));

  auto vt = Vtree::right_linear([&] {
    std::vector<VarId> vars(n_features);
    for (int i = 0; i < n_features; ++i) vars[i] = static_cast<VarId>(i + 1);
    return vars;
  }());

  auto draw = [&](DatasetTable& table, int rows) {
    table.columns.resize(n_features);
    std::normal_distribution<double> noise(0.0, 0.1);
    for (int r = 0; r < rows; ++r) {
      std::vector<std::uint8_t> row(n_features);
      double y = lm.bias;
      for (int j = 0; j < n_features; ++j) {
        row[j] = std::uniform_real_distribution<double>(0, 1)(rng) < marginals[j];
        y += row[j] * lm.weights[j];
      }
      table.rows.push_back(std::move(row));
      table.targets.push_back(y + noise(rng));
    }
  };

  Setup s{vt, factorized_to_pc(marginals, vt), linear_to_rc(lm, vt), {}, {}};
  draw(s.test, test_rows);
  draw(s.train, train_rows);
  return s;
}

ExperimentConfig base_config(const Setup& s) {
  ExperimentConfig cfg;
  cfg.pc = &s.pc;
  cfg.model = &s.rc;
  cfg.test = &s.test;
  cfg.train = &s.train;
  cfg.task = Task::Regression;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("rate zero: every method reduces to direct evaluation") {
  Setup s = make_setup(6, 50, 40, 91);
  ExperimentConfig cfg = base_config(s);
  cfg.rates = {0.0};
  cfg.methods = {"expected", "mpe", "mean", "median"};
  cfg.repetitions = 2;
  auto rows = run_missing_experiment(cfg);
  REQUIRE(rows.size() == 8);

  // direct-evaluation RMSE computed independently
  double acc = 0.0;
  for (std::size_t r = 0; r < s.test.row_count(); ++r) {
    Assignment x(6);
    for (int j = 0; j < 6; ++j) x.set(static_cast<VarId>(j + 1), s.test.rows[r][j]);
    double err = evaluate_rc(s.rc, x) - s.test.targets[r];
    acc += err * err;
  }
  double direct = std::sqrt(acc / static_cast<double>(s.test.row_count()));
  for (const auto& row : rows) CHECK(row.metric == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("rate one: the expected method predicts the unconditional mean everywhere") {
  Setup s = make_setup(6, 50, 40, 92);
  ExperimentConfig cfg = base_config(s);
  cfg.rates = {1.0};
  cfg.methods = {"expected"};
  cfg.repetitions = 1;
  auto rows = run_missing_experiment(cfg);
  REQUIRE(rows.size() == 1);

  PairCache cache;
  double mean_pred = ec2_expectation(s.pc, s.rc, cache);
  double acc = 0.0;
  for (double y : s.test.targets) acc += (mean_pred - y) * (mean_pred - y);
  double expected_rmse = std::sqrt(acc / static_cast<double>(s.test.row_count()));
  CHECK(rows[0].metric == doctest::Approx(expected_rmse).epsilon(1e-12));
}

TEST_CASE("fixed seeds give byte-identical tables") {
  Setup s = make_setup(5, 30, 25, 93);
  ExperimentConfig cfg = base_config(s);
  cfg.rates = {0.3, 0.6};
  cfg.methods = {"expected", "mean"};
  cfg.repetitions = 3;
  std::string a = metrics_to_tsv(run_missing_experiment(cfg));
  std::string b = metrics_to_tsv(run_missing_experiment(cfg));
  CHECK(a == b);
  CHECK(a.find("wall_ms") == std::string::npos);

  cfg.seed = 8;
  std::string c = metrics_to_tsv(run_missing_experiment(cfg));
  CHECK(a != c);  // different masks, different metrics
}

TEST_CASE("unknown methods are rejected; mice is a placeholder") {
  Setup s = make_setup(4, 20, 10, 94);
  ExperimentConfig cfg = base_config(s);
  cfg.rates = {0.5};
  cfg.methods = {"nearest"};
  cfg.repetitions = 1;
  CHECK_THROWS_WITH_AS(run_missing_experiment(cfg), doctest::Contains("nearest"), QueryError);

  cfg.methods = {"mice"};
  auto rows = run_missing_experiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].supported);
  CHECK(metrics_to_tsv(rows).find("unsupported") != std::string::npos);
}

TEST_CASE("rates outside the unit interval are rejected") {
  Setup s = make_setup(4, 20, 10, 95);
  ExperimentConfig cfg = base_config(s);
  cfg.rates = {1.5};
  cfg.methods = {"expected"};
  CHECK_THROWS_AS(run_missing_experiment(cfg), QueryError);
}

TEST_CASE("classification path: NB/LC pair with accuracy metric") {
  std::mt19937_64 rng(96);
  int n = 5;
  NaiveBayesModel nb;
  nb.class_prior = 0.45;
  LinearModel lm;
  lm.bias = -0.2;
  for (int i = 0; i < n; ++i) {
    nb.theta_given_c.push_back(std::uniform_real_distribution<double>(0.2, 0.9)(rng));
    nb.theta_given_not_c.push_back(std::uniform_real_distribution<double>(0.1, 0.8)(rng));
    lm.weights.push_back(std::uniform_real_distribution<double>(-1.5, 1.5)(rng));
  }
  Circuit pc = nb_to_pc(nb);
  Circuit lc = lr_to_lc(lm, true);

  DatasetTable test;
  test.columns.resize(n);
  for (int r = 0; r < 40; ++r) {
    std::vector<std::uint8_t> row(n);
    double g = lm.bias;
    for (int j = 0; j < n; ++j) {
      row[j] = (rng() & 1) != 0;
      g += row[j] * lm.weights[j];
    }
    test.rows.push_back(row);
    test.labels.push_back(g >= 0.0 ? 1 : 0);  // labels from the model itself
  }

  ExperimentConfig cfg;
  cfg.pc = &pc;
  cfg.model = &lc;
  cfg.test = &test;
  cfg.task = Task::Classification;
  cfg.class_in_circuit = true;
  cfg.rates = {0.0, 0.4};
  cfg.methods = {"expected", "mpe", "mean"};
  cfg.repetitions = 2;
  cfg.seed = 5;
  cfg.taylor = {.degree = 1, .mode = AlphaMode::Mean};
  auto rows = run_missing_experiment(cfg);
  REQUIRE(rows.size() == 12);
  for (const auto& row : rows) {
    CHECK(row.metric >= 0.0);
    CHECK(row.metric <= 1.0);
    if (row.rate == 0.0) CHECK(row.metric == doctest::Approx(1.0));  // consistent labels
  }
}

TEST_CASE("rows with zero-probability observations fall back instead of aborting") {
  // the PC believes feature 1 is always on; the test rows disagree
  auto vt = Vtree::right_linear({1, 2, 3});
  Circuit pc = factorized_to_pc({1.0, 0.5, 0.5}, vt);
  LinearModel lm;
  lm.bias = 0.0;
  lm.weights = {1.0, 2.0, 4.0};
  Circuit rc = linear_to_rc(lm, vt);

  DatasetTable test;
  test.columns = {"a", "b", "c"};
  test.rows = {{0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  test.targets = {2.0, 4.0, 7.0};

  ExperimentConfig cfg;
  cfg.pc = &pc;
  cfg.model = &rc;
  cfg.test = &test;
  cfg.task = Task::Regression;
  cfg.rates = {0.0, 0.5};
  cfg.methods = {"expected", "mpe", "mean"};
  cfg.repetitions = 2;
  cfg.seed = 19;
  auto rows = run_missing_experiment(cfg);
  REQUIRE(rows.size() == 12);
  for (const auto& row : rows) CHECK(std::isfinite(row.metric));
}

TEST_CASE("column/variable mismatches are reported") {
  Setup s = make_setup(5, 20, 10, 97);
  ExperimentConfig cfg = base_config(s);
  DatasetTable narrow = s.test;
  narrow.columns.pop_back();
  for (auto& row : narrow.rows) row.pop_back();
  cfg.test = &narrow;
  cfg.rates = {0.2};
  cfg.methods = {"expected"};
  CHECK_THROWS_WITH_AS(run_missing_experiment(cfg), doctest::Contains("columns"), QueryError);
}
