#include "pcm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pcm/errors.hpp"
#include "pcm/evaluate.hpp"
#include "pcm/moments.hpp"

namespace pcm {

namespace {

struct Runner {
  const ExperimentConfig& cfg;
  VarId first_feature_var;
  std::size_t n_features;
  bool pc_deterministic;
  std::vector<std::uint8_t> imputed_value;  // per feature, majority fill
  double unconditional_prediction;
  Assignment global_mode;  // unconditional MPE completion

  explicit Runner(const ExperimentConfig& c)
      : cfg(c),
        first_feature_var(c.class_in_circuit ? 2 : 1),
        n_features(c.test->feature_count()),
        pc_deterministic(is_output_deterministic(*c.pc)) {
    std::size_t circuit_vars = cfg.pc->vtree().var_count();
    std::size_t expected_vars = n_features + (cfg.class_in_circuit ? 1 : 0);
    if (circuit_vars != expected_vars)
      throw QueryError("dataset columns do not match circuit variables (" +
                       std::to_string(n_features) + " features, " +
                       std::to_string(circuit_vars) + " circuit variables)");
    if (!Vtree::structurally_equal(cfg.pc->vtree(), cfg.model->vtree()))
      throw QueryError("circuit pair does not share a vtree");
    if (cfg.task == Task::Regression && cfg.test->targets.size() != cfg.test->row_count())
      throw QueryError("regression experiment needs a target column");
    if (cfg.task == Task::Classification && cfg.test->labels.size() != cfg.test->row_count())
      throw QueryError("classification experiment needs a class column");

    compute_imputation_stats();
    PredictOptions opt{cfg.task, cfg.taylor};
    unconditional_prediction = expected_prediction(*cfg.pc, *cfg.model, Evidence{}, opt);
    global_mode = mpe(*cfg.pc, Evidence{}, pc_deterministic).completion;
  }

  VarId var_of(std::size_t feature) const {
    return static_cast<VarId>(feature + first_feature_var);
  }

  // Majority fill per feature: training-set mean when a training table is
  // given, the PC's own marginal p(X=1) otherwise. Mean and median of a 0/1
  // column round to the same majority value.
  void compute_imputation_stats() {
    imputed_value.resize(n_features);
    for (std::size_t j = 0; j < n_features; ++j) {
      double mean;
      if (cfg.train) {
        double on = 0;
        for (const auto& row : cfg.train->rows) on += row[j];
        mean = cfg.train->row_count() ? on / static_cast<double>(cfg.train->row_count()) : 0.5;
      } else {
        Evidence ev;
        ev.set(var_of(j), true);
        mean = marginal(*cfg.pc, ev);
      }
      imputed_value[j] = mean >= 0.5 ? 1 : 0;
    }
  }

  double model_output(const Assignment& x) const {
    double g = evaluate_rc(*cfg.model, x);
    return cfg.task == Task::Classification ? sigmoid(g) : g;
  }

  Assignment assignment_for(const std::vector<std::uint8_t>& features, bool class_value) const {
    Assignment x(cfg.pc->vtree().var_count());
    if (cfg.class_in_circuit) x.set(1, class_value);
    for (std::size_t j = 0; j < n_features; ++j) x.set(var_of(j), features[j] != 0);
    return x;
  }

  Evidence observed_evidence(const std::vector<std::uint8_t>& row,
                             const std::vector<std::uint8_t>& missing) const {
    Evidence ev;
    for (std::size_t j = 0; j < n_features; ++j)
      if (!missing[j]) ev.set(var_of(j), row[j] != 0);
    return ev;
  }

  double predict(const std::string& method, const std::vector<std::uint8_t>& row,
                 const std::vector<std::uint8_t>& missing) const {
    if (method == "expected") {
      Evidence ev = observed_evidence(row, missing);
      // observations the PC gives no mass admit no conditional
      if (ev.empty() || marginal(*cfg.pc, ev) <= 1e-12) return unconditional_prediction;
      PredictOptions opt{cfg.task, cfg.taylor};
      return expected_prediction(*cfg.pc, *cfg.model, ev, opt);
    }
    if (method == "mpe") {
      Evidence ev = observed_evidence(row, missing);
      if (marginal(*cfg.pc, ev) <= 0.0) {
        // keep the observed cells, fill the rest from the global mode
        std::vector<std::uint8_t> filled = row;
        for (std::size_t j = 0; j < n_features; ++j)
          if (missing[j]) filled[j] = global_mode.get(var_of(j)) ? 1 : 0;
        return model_output(assignment_for(filled, global_mode.get(1)));
      }
      MpeResult r = mpe(*cfg.pc, ev, pc_deterministic);
      return model_output(r.completion);
    }
    if (method == "mean" || method == "median") {
      std::vector<std::uint8_t> filled = row;
      for (std::size_t j = 0; j < n_features; ++j)
        if (missing[j]) filled[j] = imputed_value[j];
      return model_output(assignment_for(filled, false));
    }
    throw QueryError("unknown method '" + method + "'");
  }

  double metric_over_rows(const std::string& method,
                          const std::vector<std::vector<std::uint8_t>>& missing) const {
    double acc = 0.0;
    for (std::size_t r = 0; r < cfg.test->row_count(); ++r) {
      double pred = predict(method, cfg.test->rows[r], missing[r]);
      if (cfg.task == Task::Regression) {
        double err = pred - cfg.test->targets[r];
        acc += err * err;
      } else {
        bool predicted = pred >= 0.5;
        acc += predicted == (cfg.test->labels[r] != 0) ? 1.0 : 0.0;
      }
    }
    double n = static_cast<double>(cfg.test->row_count());
    return cfg.task == Task::Regression ? std::sqrt(acc / n) : acc / n;
  }
};

}  // namespace

std::vector<MetricsRow> run_missing_experiment(const ExperimentConfig& config) {
  if (!config.pc || !config.model || !config.test) throw QueryError("incomplete experiment config");
  if (config.repetitions < 1) throw QueryError("repetitions must be >= 1");
  for (double r : config.rates)
    if (r < 0.0 || r > 1.0) throw QueryError("missing rate outside [0, 1]");
  for (const std::string& m : config.methods)
    if (m != "expected" && m != "mpe" && m != "mean" && m != "median" && m != "mice")
      throw QueryError("unknown method '" + m + "'");

  Runner runner(config);
  std::vector<MetricsRow> out;
  std::vector<std::vector<std::uint8_t>> missing(config.test->row_count(),
                                                 std::vector<std::uint8_t>(runner.n_features, 0));

  for (std::size_t rate_index = 0; rate_index < config.rates.size(); ++rate_index) {
    double rate = config.rates[rate_index];
    for (int rep = 0; rep < config.repetitions; ++rep) {
      std::mt19937_64 rng(config.seed + 1000 * rate_index + static_cast<std::uint64_t>(rep));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (auto& row : missing)
        for (auto& cell : row) cell = unif(rng) < rate ? 1 : 0;

      for (const std::string& method : config.methods) {
        MetricsRow row;
        row.method = method;
        row.rate = rate;
        row.repetition = rep;
        if (method == "mice") {
          row.metric = std::numeric_limits<double>::quiet_NaN();
          row.supported = false;  // external statistical machinery, not shipped
        } else {
          auto t0 = std::chrono::steady_clock::now();
          row.metric = runner.metric_over_rows(method, missing);
          auto t1 = std::chrono::steady_clock::now();
          row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        out.push_back(std::move(row));
      }
    }
  }
  return out;
}

namespace {

std::string format_metric(const MetricsRow& row) {
  if (!row.supported) return "unsupported";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12f", row.metric);
  return buf;
}

std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", rate);
  return buf;
}

}  // namespace

std::string metrics_to_tsv(const std::vector<MetricsRow>& rows, bool timings) {
  std::ostringstream os;
  os << "method\trate\trepetition\tmetric";
  if (timings) os << "\twall_ms";
  os << "\n";
  for (const MetricsRow& r : rows) {
    os << r.method << "\t" << format_rate(r.rate) << "\t" << r.repetition << "\t"
       << format_metric(r);
    if (timings) os << "\t" << r.wall_ms;
    os << "\n";
  }
  return os.str();
}

std::string metrics_to_json(const std::vector<MetricsRow>& rows, bool timings) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MetricsRow& r : rows) {
    nlohmann::json obj;
    obj["method"] = r.method;
    obj["rate"] = r.rate;
    obj["repetition"] = r.repetition;
    if (r.supported)
      obj["metric"] = r.metric;
    else
      obj["metric"] = "unsupported";
    if (timings) obj["wall_ms"] = r.wall_ms;
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

}  // namespace pcm
