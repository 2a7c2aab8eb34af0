// pcm — inference queries, validation and missing-value experiments over
// probabilistic/regression circuit pairs sharing a vtree.
//
// Exit codes: 0 ok, 1 validation failure, 2 query error, 3 io/parse error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pcm/errors.hpp"
#include "pcm/evaluate.hpp"
#include "pcm/experiment.hpp"
#include "pcm/io.hpp"
#include "pcm/moments.hpp"
#include "pcm/oracle.hpp"
#include "pcm/taylor.hpp"
#include "pcm/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitQuery = 2;
constexpr int kExitIo = 3;

std::string scalar(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

pcm::Evidence parse_evidence(const std::vector<std::string>& sets) {
  pcm::Evidence ev;
  for (const std::string& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq + 1 >= s.size())
      throw pcm::QueryError("--set expects VAR=0|1, got '" + s + "'");
    std::string var = s.substr(0, eq);
    std::string val = s.substr(eq + 1);
    // allow a leading letter prefix, e.g. X1 or x12
    std::size_t digits = 0;
    while (digits < var.size() && !std::isdigit(static_cast<unsigned char>(var[digits]))) ++digits;
    if (digits == var.size()) throw pcm::QueryError("no variable index in '" + s + "'");
    pcm::VarId v = static_cast<pcm::VarId>(std::stoul(var.substr(digits)));
    if (val != "0" && val != "1") throw pcm::QueryError("--set value must be 0 or 1 in '" + s + "'");
    ev.set(v, val == "1");
  }
  return ev;
}

pcm::TaylorOptions parse_taylor(int order, const std::string& alpha) {
  pcm::TaylorOptions t;
  t.degree = order;
  if (alpha == "zero") {
    t.mode = pcm::AlphaMode::Zero;
  } else if (alpha == "mean") {
    t.mode = pcm::AlphaMode::Mean;
  } else {
    t.mode = pcm::AlphaMode::Fixed;
    t.fixed_alpha = std::stod(alpha);
  }
  return t;
}

struct LoadedPair {
  std::shared_ptr<const pcm::Vtree> vtree;
  std::optional<pcm::Circuit> pc;
  std::optional<pcm::Circuit> rc;
};

LoadedPair load(const std::string& vtree_path, const std::string& pc_path,
                const std::string& rc_path, bool normalize) {
  LoadedPair out;
  // With an explicit --vtree both circuits share one vtree object; otherwise
  // each circuit resolves the file named in its own header, and compatibility
  // stays a real (structural) check.
  if (!vtree_path.empty()) out.vtree = pcm::parse_vtree(pcm::read_file(vtree_path));
  if (!pc_path.empty()) {
    pcm::Circuit pc = pcm::load_circuit_file(pc_path, out.vtree);
    out.pc = normalize ? pcm::normalize_alternating(pc) : std::move(pc);
  }
  if (!rc_path.empty()) {
    pcm::Circuit rc = pcm::load_circuit_file(rc_path, out.vtree);
    out.rc = normalize ? pcm::normalize_alternating(rc) : std::move(rc);
  }
  if (!out.vtree) out.vtree = out.pc ? out.pc->vtree_ptr() : out.rc->vtree_ptr();
  return out;
}

int cmd_validate(const std::string& vtree_path, const std::string& pc_path,
                 const std::string& rc_path) {
  LoadedPair in = load(vtree_path, pc_path, rc_path, /*normalize=*/false);
  std::vector<pcm::ValidationReport> reports;
  if (in.pc) {
    auto r = pcm::validate_circuit(*in.pc);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (in.rc) {
    auto r = pcm::validate_circuit(*in.rc);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (in.pc && in.rc) reports.push_back(pcm::check_vtree_compatibility(*in.pc, *in.rc));
  for (const auto& r : reports) std::cout << pcm::to_text(r);
  return pcm::all_ok(reports) ? kExitOk : kExitValidation;
}

int cmd_query(const std::string& kind, const LoadedPair& in, const pcm::Evidence& ev, int order,
              const std::string& alpha, bool oracle) {
  const bool small = in.pc->vtree().var_count() <= 20;

  if (kind == "marginal") {
    std::cout << scalar(pcm::marginal(*in.pc, ev)) << "\n";
    if (oracle && small) {
      pcm::ConfiguredPC conf = pcm::configure(*in.pc, ev);
      double mass = 0.0;
      std::size_t n = in.pc->vtree().var_count();
      for (std::uint64_t m = 0; m < (1ULL << n); ++m)
        mass += pcm::evaluate_configured(conf, pcm::Assignment::from_mask(m, n));
      std::cout << "oracle " << scalar(mass) << "\n";
    }
    return kExitOk;
  }
  if (kind == "mpe") {
    pcm::MpeResult r = pcm::mpe(*in.pc, ev);
    for (pcm::VarId v : in.pc->vtree().variables())
      std::cout << "X" << v << "=" << (r.completion.get(v) ? 1 : 0) << " ";
    std::cout << "\nprobability " << scalar(r.probability) << "\n";
    if (r.approximate) std::cout << "approximate (PC is not deterministic)\n";
    if (oracle && small) {
      auto tie = pcm::oracle::enum_mpe(*in.pc, ev);
      std::cout << "oracle probability " << scalar(tie.probability) << " (tie-set size "
                << tie.completions.size() << ")\n";
    }
    return kExitOk;
  }

  if (!in.rc) throw pcm::QueryError("query kind '" + kind + "' needs --rc");
  auto conditional_oracle_moment = [&](int k) {
    double mass = pcm::oracle::enum_moment(*in.pc, *in.rc, 0, ev);
    return pcm::oracle::enum_moment(*in.pc, *in.rc, k, ev) / mass;
  };

  if (kind == "expectation") {
    double value = pcm::conditional_moments(*in.pc, *in.rc, ev, 1)[1];
    std::cout << scalar(value) << "\n";
    if (oracle && small) std::cout << "oracle " << scalar(conditional_oracle_moment(1)) << "\n";
    return kExitOk;
  }
  if (kind == "moment") {
    pcm::MomentVector m = pcm::conditional_moments(*in.pc, *in.rc, ev, order);
    for (int k = 0; k <= m.order(); ++k) std::cout << "M" << k << " " << scalar(m[k]) << "\n";
    if (oracle && small)
      for (int k = 1; k <= m.order(); ++k)
        std::cout << "oracle M" << k << " " << scalar(conditional_oracle_moment(k)) << "\n";
    return kExitOk;
  }
  if (kind == "stats") {
    pcm::DistributionStats s = pcm::distribution_stats(*in.pc, *in.rc, ev);
    std::cout << "mean " << scalar(s.mean) << "\n";
    std::cout << "variance " << scalar(s.variance) << "\n";
    std::cout << "std " << scalar(s.stddev) << "\n";
    if (oracle && small) {
      double m1 = conditional_oracle_moment(1);
      double m2 = conditional_oracle_moment(2);
      std::cout << "oracle mean " << scalar(m1) << "\n";
      std::cout << "oracle variance " << scalar(m2 - m1 * m1) << "\n";
    }
    return kExitOk;
  }
  if (kind == "taylor") {
    pcm::TaylorOptions t = parse_taylor(order, alpha);
    int k = std::max(t.degree, 2);  // keep the dispersion diagnostic available
    pcm::MomentVector m = pcm::conditional_moments(*in.pc, *in.rc, ev, k);
    std::cout << scalar(pcm::taylor_from_moments(m, t)) << "\n";
    pcm::MomentVector centered = pcm::shifted_moments(m, m[1] / m[0]);
    std::cout << "centered M2 " << scalar(centered[2]) << "\n";
    if (oracle && small) {
      double mass = pcm::oracle::enum_moment(*in.pc, *in.rc, 0, ev);
      std::cout << "oracle "
                << scalar(pcm::oracle::enum_sigmoid_expectation(*in.pc, *in.rc, ev) / mass) << "\n";
    }
    return kExitOk;
  }
  throw pcm::QueryError("unknown query kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact expectations and moments of regression circuits under "
               "probabilistic circuits sharing a vtree"};
  app.require_subcommand(1);

  std::string vtree_path, pc_path, rc_path, model_path, fit_path;
  std::string target_col, class_col, alpha = "mean", format = "tsv", out_path;
  std::string marginals_csv;
  std::vector<std::string> sets, drop_cols, methods{"expected", "mpe", "mean", "median"};
  std::vector<double> rates{0.0, 0.25, 0.5, 0.75};
  int order = 1, reps = 10;
  std::uint64_t seed = 0;
  double laplace = 1.0, l2 = 1e-6;
  bool oracle = false, timings = false, include_class = true;
  std::string task = "regression";

  auto* validate = app.add_subcommand("validate", "structural checks with witness reports");
  validate->add_option("--vtree", vtree_path, "vtree file");
  validate->add_option("--pc", pc_path, "probabilistic circuit file");
  validate->add_option("--rc", rc_path, "regression/logistic circuit file");

  auto* query = app.add_subcommand("query", "inference over a circuit (pair)");
  std::string kind;
  query->add_option("kind", kind, "expectation|moment|stats|taylor|mpe|marginal")->required();
  query->add_option("--vtree", vtree_path, "vtree file");
  query->add_option("--pc", pc_path, "probabilistic circuit file")->required();
  query->add_option("--rc", rc_path, "regression/logistic circuit file");
  query->add_option("--set", sets, "evidence assignment VAR=0|1 (repeatable)");
  query->add_option("--order", order, "moment order / Taylor degree");
  query->add_option("--alpha", alpha, "Taylor expansion point: zero|mean|<value>");
  query->add_flag("--oracle", oracle, "cross-check by exhaustive enumeration (<= 20 vars)");

  auto* compile = app.add_subcommand("compile", "build circuits from simple models");
  std::string what, out_circuit, out_vtree, out_model;
  compile->add_option("model-kind", what, "nb|linear|factorized")->required();
  compile->add_option("--model", model_path, "model parameter file");
  compile->add_option("--fit", fit_path, "dataset to fit the model from");
  compile->add_option("--target", target_col, "target column (linear fit)");
  compile->add_option("--class", class_col, "class column (nb fit)");
  compile->add_option("--laplace", laplace, "Laplace smoothing for nb fit");
  compile->add_option("--l2", l2, "ridge penalty for linear fit");
  compile->add_option("--marginals", marginals_csv, "comma list for factorized");
  compile->add_option("--drop", drop_cols, "dataset columns to ignore (repeatable)");
  compile->add_option("--vtree", vtree_path, "vtree file to build on (default right-linear)");
  compile->add_flag("--include-class,!--no-class", include_class,
                    "linear: include the class variable at the vtree top");
  compile->add_option("--out", out_circuit, "output circuit file")->required();
  compile->add_option("--out-vtree", out_vtree, "output vtree file");
  compile->add_option("--out-model", out_model, "output fitted model file");

  auto* experiment = app.add_subcommand("experiment", "missing-value prediction benchmark");
  std::string test_path, train_path;
  experiment->add_option("--vtree", vtree_path, "vtree file");
  experiment->add_option("--pc", pc_path, "probabilistic circuit file")->required();
  experiment->add_option("--rc", rc_path, "model circuit file")->required();
  experiment->add_option("--test", test_path, "test dataset csv")->required();
  experiment->add_option("--train", train_path, "training dataset csv (imputation stats)");
  experiment->add_option("--target", target_col, "regression target column");
  experiment->add_option("--class", class_col, "classification class column");
  experiment->add_option("--drop", drop_cols, "dataset columns to ignore (repeatable)");
  experiment->add_option("--rates", rates, "missing rates")->delimiter(',');
  experiment->add_option("--methods", methods, "expected|mpe|mean|median")->delimiter(',');
  experiment->add_option("--reps", reps, "repetitions per rate");
  experiment->add_option("--seed", seed, "base seed");
  experiment->add_option("--task", task, "regression|classification");
  experiment->add_option("--order", order, "Taylor degree for classification");
  experiment->add_option("--alpha", alpha, "Taylor expansion point");
  experiment->add_option("--format", format, "tsv|json");
  experiment->add_option("--out", out_path, "write table here instead of stdout");
  experiment->add_flag("--timings", timings, "include wall-clock column");

  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive-enumeration cross-checks");
  std::string oracle_kind;
  oracle_cmd->add_option("kind", oracle_kind, "moment|sigmoid-expectation|mpe")->required();
  oracle_cmd->add_option("--vtree", vtree_path, "vtree file");
  oracle_cmd->add_option("--pc", pc_path, "probabilistic circuit file")->required();
  oracle_cmd->add_option("--rc", rc_path, "regression/logistic circuit file");
  oracle_cmd->add_option("--set", sets, "evidence assignment VAR=0|1 (repeatable)");
  oracle_cmd->add_option("--order", order, "moment order");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(vtree_path, pc_path, rc_path);

    if (query->parsed()) {
      LoadedPair in = load(vtree_path, pc_path, rc_path, /*normalize=*/true);
      return cmd_query(kind, in, parse_evidence(sets), order, alpha, oracle);
    }

    if (compile->parsed()) {
      std::shared_ptr<const pcm::Vtree> vt;
      if (!vtree_path.empty()) vt = pcm::parse_vtree(pcm::read_file(vtree_path));
      std::optional<pcm::Circuit> circuit;
      std::string provenance;  // comment lines recording the variable mapping

      auto column_note = [&](const pcm::DatasetTable& data, bool with_class) {
        std::string note;
        if (with_class) note += "c variable 1: class\n";
        for (std::size_t j = 0; j < data.columns.size(); ++j)
          note += "c variable " + std::to_string(j + (with_class ? 2 : 1)) + ": " +
                  data.columns[j] + "\n";
        return note;
      };

      if (what == "nb") {
        pcm::NaiveBayesModel nb;
        if (!model_path.empty()) {
          nb = pcm::parse_nb_model(pcm::read_file(model_path));
        } else if (!fit_path.empty()) {
          if (class_col.empty()) throw pcm::QueryError("nb fit needs --class");
          pcm::DatasetTable data =
              pcm::load_dataset(pcm::read_file(fit_path), target_col, class_col, drop_cols);
          nb = pcm::fit_naive_bayes(data, laplace);
          provenance = column_note(data, /*with_class=*/true);
        } else {
          throw pcm::QueryError("compile nb needs --model or --fit");
        }
        if (!out_model.empty()) pcm::write_file(out_model, pcm::serialize_nb_model(nb));
        circuit = pcm::nb_to_pc(nb);
      } else if (what == "linear") {
        pcm::LinearModel lm;
        if (!model_path.empty()) {
          lm = pcm::parse_linear_model(pcm::read_file(model_path));
        } else if (!fit_path.empty()) {
          if (target_col.empty()) throw pcm::QueryError("linear fit needs --target");
          pcm::DatasetTable data =
              pcm::load_dataset(pcm::read_file(fit_path), target_col, class_col, drop_cols);
          lm = pcm::fit_ridge(data, l2);
          bool class_at_top = (vt && vt->var_count() == lm.feature_count() + 1) ||
                              (!vt && include_class);
          provenance = column_note(data, class_at_top);
        } else {
          throw pcm::QueryError("compile linear needs --model or --fit");
        }
        if (!out_model.empty()) pcm::write_file(out_model, pcm::serialize_linear_model(lm));
        if (vt && vt->var_count() == lm.feature_count() + 1) {
          // class-bearing vtree (class at variable 1): features shift to 2..n+1
          pcm::LinearModel padded = lm;
          padded.weights.insert(padded.weights.begin(), 0.0);
          circuit = pcm::linear_to_rc(padded, vt);
        } else if (vt) {
          circuit = pcm::linear_to_rc(lm, vt);
        } else {
          circuit = pcm::lr_to_lc(lm, include_class);
        }
      } else if (what == "factorized") {
        std::vector<double> marginals;
        if (!marginals_csv.empty()) {
          std::size_t start = 0;
          while (start <= marginals_csv.size()) {
            std::size_t comma = marginals_csv.find(',', start);
            if (comma == std::string::npos) comma = marginals_csv.size();
            marginals.push_back(std::stod(marginals_csv.substr(start, comma - start)));
            if (comma == marginals_csv.size()) break;
            start = comma + 1;
          }
        } else if (!fit_path.empty()) {
          pcm::DatasetTable data =
              pcm::load_dataset(pcm::read_file(fit_path), target_col, class_col, drop_cols);
          marginals.assign(data.feature_count(), 0.0);
          for (const auto& row : data.rows)
            for (std::size_t j = 0; j < row.size(); ++j) marginals[j] += row[j];
          for (double& m : marginals) m /= static_cast<double>(data.row_count());
          provenance = column_note(data, /*with_class=*/false);
        } else {
          throw pcm::QueryError("compile factorized needs --marginals or --fit");
        }
        if (!vt) {
          std::vector<pcm::VarId> vars(marginals.size());
          for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = static_cast<pcm::VarId>(i + 1);
          vt = pcm::Vtree::right_linear(vars);
        }
        circuit = pcm::factorized_to_pc(marginals, vt);
      } else {
        throw pcm::QueryError("unknown compile kind '" + what + "'");
      }

      std::string hint = !out_vtree.empty() ? out_vtree : vtree_path;
      auto slash = hint.find_last_of('/');
      if (slash != std::string::npos) hint = hint.substr(slash + 1);
      if (!out_vtree.empty())
        pcm::write_file(out_vtree, provenance + pcm::serialize_vtree(circuit->vtree()));
      pcm::write_file(out_circuit, provenance + pcm::serialize_circuit(*circuit, hint));
      return kExitOk;
    }

    if (experiment->parsed()) {
      auto raw = load(vtree_path, pc_path, rc_path, /*normalize=*/false);
      std::vector<pcm::ValidationReport> reports = pcm::validate_circuit(*raw.pc);
      auto rc_reports = pcm::validate_circuit(*raw.rc);
      reports.insert(reports.end(), rc_reports.begin(), rc_reports.end());
      reports.push_back(pcm::check_vtree_compatibility(*raw.pc, *raw.rc));
      if (!pcm::all_ok(reports)) {
        for (const auto& r : reports) std::cerr << pcm::to_text(r);
        return kExitValidation;
      }
      pcm::Circuit pc = pcm::normalize_alternating(*raw.pc);
      pcm::Circuit model = pcm::normalize_alternating(*raw.rc);

      pcm::ExperimentConfig cfg;
      cfg.pc = &pc;
      cfg.model = &model;
      cfg.task = task == "classification" ? pcm::Task::Classification : pcm::Task::Regression;
      pcm::DatasetTable test = pcm::load_dataset(pcm::read_file(test_path), target_col, class_col, drop_cols);
      pcm::DatasetTable train;
      cfg.test = &test;
      if (!train_path.empty()) {
        train = pcm::load_dataset(pcm::read_file(train_path), target_col, class_col, drop_cols);
        cfg.train = &train;
      }
      cfg.rates = rates;
      cfg.methods = methods;
      cfg.repetitions = reps;
      cfg.seed = seed;
      cfg.taylor = parse_taylor(order, alpha);
      cfg.class_in_circuit = pc.vtree().var_count() == test.feature_count() + 1;
      auto rows = pcm::run_missing_experiment(cfg);
      std::string rendered = format == "json" ? pcm::metrics_to_json(rows, timings)
                                              : pcm::metrics_to_tsv(rows, timings);
      if (out_path.empty())
        std::cout << rendered;
      else
        pcm::write_file(out_path, rendered);
      return kExitOk;
    }

    if (oracle_cmd->parsed()) {
      LoadedPair in = load(vtree_path, pc_path, rc_path, /*normalize=*/true);
      pcm::Evidence ev = parse_evidence(sets);
      if (oracle_kind == "moment") {
        if (!in.rc) throw pcm::QueryError("oracle moment needs --rc");
        double mass = pcm::oracle::enum_moment(*in.pc, *in.rc, 0, ev);
        for (int k = 0; k <= order; ++k)
          std::cout << "M" << k << " "
                    << scalar(pcm::oracle::enum_moment(*in.pc, *in.rc, k, ev) / mass) << "\n";
      } else if (oracle_kind == "sigmoid-expectation") {
        if (!in.rc) throw pcm::QueryError("oracle sigmoid-expectation needs --rc");
        double mass = pcm::oracle::enum_moment(*in.pc, *in.rc, 0, ev);
        std::cout << scalar(pcm::oracle::enum_sigmoid_expectation(*in.pc, *in.rc, ev) / mass)
                  << "\n";
      } else if (oracle_kind == "mpe") {
        auto tie = pcm::oracle::enum_mpe(*in.pc, ev);
        std::cout << "probability " << scalar(tie.probability) << " tie-set "
                  << tie.completions.size() << "\n";
      } else {
        throw pcm::QueryError("unknown oracle kind '" + oracle_kind + "'");
      }
      return kExitOk;
    }
  } catch (const pcm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const pcm::QueryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitQuery;
  }
  return kExitOk;
}
