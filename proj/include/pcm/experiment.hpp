#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcm/compile.hpp"
#include "pcm/taylor.hpp"

namespace pcm {

// Missing-value prediction experiment: features are masked completely at
// random at each requested rate, predictions are made per method, and one
// metric row (RMSE or accuracy) is emitted per (method, rate, repetition).
struct ExperimentConfig {
  const Circuit* pc = nullptr;
  const Circuit* model = nullptr;       // RC (regression) or LC (classification)
  const DatasetTable* test = nullptr;   // targets (regression) or labels (classification)
  const DatasetTable* train = nullptr;  // optional; supplies imputation statistics

  Task task = Task::Regression;
  std::vector<double> rates;
  std::vector<std::string> methods;  // subset of expected | mpe | mean | median
  int repetitions = 10;
  std::uint64_t seed = 0;

  // Circuit variable 1 is a class variable (features start at variable 2).
  bool class_in_circuit = false;

  TaylorOptions taylor;  // classification expected-prediction options
};

struct MetricsRow {
  std::string method;
  double rate = 0.0;
  int repetition = 0;
  double metric = 0.0;   // RMSE or accuracy
  double wall_ms = 0.0;
  bool supported = true;  // false for the mice placeholder
};

// Deterministic given the config: the per-cell generator is seeded with
// seed + 1000 * rate_index + repetition. Row order is rates x repetitions x
// methods in config order.
std::vector<MetricsRow> run_missing_experiment(const ExperimentConfig& config);

// TSV with header. Wall time is a column only when timings is set; the
// default output is byte-stable across reruns of the same config and seed.
std::string metrics_to_tsv(const std::vector<MetricsRow>& rows, bool timings = false);
std::string metrics_to_json(const std::vector<MetricsRow>& rows, bool timings = false);

}  // namespace pcm
