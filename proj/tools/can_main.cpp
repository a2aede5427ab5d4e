// can: re-adjust ambiguous classifier predictions against a confident
// reference set, tune the hyperparameters on a validation split, and run
// Monte Carlo studies on random matrices.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "can/ambiguity.hpp"
#include "can/core_an.hpp"
#include "can/errors.hpp"
#include "can/metrics.hpp"
#include "can/multilabel.hpp"
#include "can/pipeline.hpp"
#include "can/prediction_io.hpp"
#include "can/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

can::TaskMode mode_from_name(const std::string& name) {
  if (name == "single") return can::TaskMode::kSingleLabel;
  if (name == "multi") return can::TaskMode::kMultiLabel;
  throw can::InvalidInput("unknown mode '" + name + "' (expected single or multi)");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw can::InvalidInput("cannot write " + path.string());
  return out;
}

can::PriorVector load_priors_with_diagnostics(const fs::path& train_labels,
                                              const std::vector<std::string>& classes,
                                              can::TaskMode mode, double smoothing) {
  std::vector<std::string> zero_classes;
  can::PriorVector priors =
      can::compute_priors(train_labels, classes, mode, smoothing, &zero_classes);
  if (!zero_classes.empty()) {
    std::cerr << "warning: " << zero_classes.size()
              << " class(es) have zero training mass and will be annihilated"
              << " (use --prior-smoothing to soften): ";
    for (std::size_t i = 0; i < zero_classes.size() && i < 5; ++i) {
      std::cerr << (i ? ", " : "") << zero_classes[i];
    }
    if (zero_classes.size() > 5) std::cerr << ", ...";
    std::cerr << "\n";
  }
  return priors;
}

struct MetricsRow {
  std::string split, scope, method;
  can::F1Report f1;
  std::optional<double> top1;
};

void append_metric_rows(std::vector<MetricsRow>& rows, const std::string& split,
                        const std::string& scope, const can::PredictionFile& baseline,
                        const can::PredictionFile& adjusted,
                        const std::vector<can::LabelSet>& gold,
                        const std::vector<std::size_t>& subset) {
  auto take = [&](const can::PredictionFile& preds) {
    can::PredictionFile out = preds;
    if (!subset.empty()) {
      can::Matrix scores(subset.size(), preds.num_classes());
      std::vector<std::string> ids;
      ids.reserve(subset.size());
      for (std::size_t r = 0; r < subset.size(); ++r) {
        ids.push_back(preds.ids[subset[r]]);
        for (std::size_t j = 0; j < preds.num_classes(); ++j) {
          scores(r, j) = preds.scores(subset[r], j);
        }
      }
      out.ids = std::move(ids);
      out.scores = std::move(scores);
    }
    return out;
  };
  auto take_gold = [&]() {
    if (subset.empty()) return gold;
    std::vector<can::LabelSet> out;
    out.reserve(subset.size());
    for (std::size_t i : subset) out.push_back(gold[i]);
    return out;
  };

  const std::vector<can::LabelSet> gold_slice = take_gold();
  if (gold_slice.empty()) return;
  for (const auto& [method, preds] :
       {std::pair<std::string, const can::PredictionFile*>{"baseline", &baseline},
        {"can", &adjusted}}) {
    const can::PredictionFile slice = take(*preds);
    MetricsRow row;
    row.split = split;
    row.scope = scope;
    row.method = method;
    row.f1 = can::loose_f1(can::predicted_label_sets(slice), gold_slice);
    if (slice.mode == can::TaskMode::kSingleLabel) {
      row.top1 = can::score_objective(slice, gold_slice, can::Objective::kTop1Accuracy);
    }
    rows.push_back(std::move(row));
  }
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out = open_output(path);
  out << "split,scope,method,macro_p,macro_r,macro_f1,micro_p,micro_r,micro_f1,"
         "top1_accuracy\n";
  for (const MetricsRow& r : rows) {
    out << r.split << ',' << r.scope << ',' << r.method << ',' << fmt(r.f1.macro_p) << ','
        << fmt(r.f1.macro_r) << ',' << fmt(r.f1.macro_f1) << ',' << fmt(r.f1.micro_p)
        << ',' << fmt(r.f1.micro_r) << ',' << fmt(r.f1.micro_f1) << ','
        << (r.top1 ? fmt(*r.top1) : std::string()) << '\n';
  }
}

void write_gains_csv(const fs::path& path, const std::vector<can::AdjustRecord>& gains) {
  std::ofstream out = open_output(path);
  out << "id,class,delta,flipped\n";
  for (const can::AdjustRecord& g : gains) {
    out << g.id << ',' << g.class_name << ',' << fmt(g.delta) << ','
        << (g.flipped ? 1 : 0) << '\n';
  }
}

// Example indices touched by the adjustment (multilabel records touch
// their example once).
std::vector<std::size_t> challenged_examples(const can::PredictionFile& preds,
                                             const std::vector<can::AdjustRecord>& gains) {
  std::vector<std::size_t> subset;
  std::size_t next = 0;
  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < preds.ids.size(); ++i) index_of.emplace(preds.ids[i], i);
  std::vector<bool> seen(preds.ids.size(), false);
  for (const can::AdjustRecord& g : gains) {
    const std::size_t i = index_of.at(g.id);
    if (!seen[i]) {
      seen[i] = true;
      ++next;
    }
  }
  subset.reserve(next);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) subset.push_back(i);
  }
  return subset;
}

int run_adjust(const std::string& val_preds_path, const std::string& val_labels_path,
               const std::string& test_preds_path, const std::string& test_labels_path,
               const std::string& train_labels_path, const std::string& mode_name,
               double alpha, std::size_t depth, double tau, std::size_t k_max,
               double smoothing, const std::string& out_dir, std::size_t threads,
               bool allow_self_reference) {
  const can::TaskMode mode = mode_from_name(mode_name);
  if (!allow_self_reference &&
      fs::weakly_canonical(val_preds_path) == fs::weakly_canonical(test_preds_path)) {
    throw can::InvalidInput(
        "refusing to build the reference set from the file being adjusted; pass "
        "--allow-self-reference to override");
  }

  const can::PredictionFile val = can::load_predictions(val_preds_path, mode);
  const can::PredictionFile test = can::load_predictions(test_preds_path, mode);
  const can::PriorVector priors =
      load_priors_with_diagnostics(train_labels_path, val.class_names, mode, smoothing);
  const can::CanHyperParams hp{alpha, depth, tau, k_max};
  hp.validate();

  const can::ApplyResult test_result = can::apply_can(test, val, priors, hp, threads);
  const can::ApplyResult val_result = can::apply_can(val, val, priors, hp, threads);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  can::write_predictions(out / "adjusted_test_predictions.csv", test_result.adjusted);
  write_gains_csv(out / "gains.csv", test_result.gains);

  std::vector<MetricsRow> rows;
  {
    const can::LabelFile val_labels = can::load_labels(val_labels_path, mode);
    const auto gold = can::resolve_label_sets(val_labels, val.ids, val.class_names);
    append_metric_rows(rows, "val", "full", val, val_result.adjusted, gold, {});
    append_metric_rows(rows, "val", "challenging", val, val_result.adjusted, gold,
                       challenged_examples(val, val_result.gains));
  }
  if (!test_labels_path.empty()) {
    const can::LabelFile test_labels = can::load_labels(test_labels_path, mode);
    const auto gold = can::resolve_label_sets(test_labels, test.ids, test.class_names);
    append_metric_rows(rows, "test", "full", test, test_result.adjusted, gold, {});
    append_metric_rows(rows, "test", "challenging", test, test_result.adjusted, gold,
                       challenged_examples(test, test_result.gains));
  }
  write_metrics_csv(out / "metrics.csv", rows);

  std::cout << "adjusted " << test_result.challenging_count << " challenging item(s) of "
            << test.size() << " test example(s) against " << test_result.reference_rows
            << " reference row(s)\n";
  std::cout << "wrote " << (out / "adjusted_test_predictions.csv").string() << "\n";
  return 0;
}

int run_tune(const std::string& val_preds_path, const std::string& val_labels_path,
             const std::string& train_labels_path, const std::string& mode_name,
             const std::string& alpha_grid, const std::string& depth_grid,
             const std::string& tau_grid, const std::string& objective_name,
             std::size_t k_max, double smoothing, const std::string& out_dir,
             std::size_t threads) {
  const can::TaskMode mode = mode_from_name(mode_name);
  const can::PredictionFile val = can::load_predictions(val_preds_path, mode);
  const can::LabelFile val_labels = can::load_labels(val_labels_path, mode);
  const can::PriorVector priors =
      load_priors_with_diagnostics(train_labels_path, val.class_names, mode, smoothing);

  can::GridSpec grids = can::GridSpec::defaults();
  if (!alpha_grid.empty()) grids.alphas = can::parse_value_grid(alpha_grid);
  if (!depth_grid.empty()) grids.depths = can::parse_count_grid(depth_grid);
  if (!tau_grid.empty()) grids.taus = can::parse_value_grid(tau_grid);
  const can::Objective objective = can::objective_from_name(objective_name);

  const can::GridSearchResult result =
      can::grid_search(val, val_labels, priors, grids, objective, k_max, threads);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  {
    std::ofstream table = open_output(out / "grid_table.csv");
    table << "alpha,depth,tau,valid,objective,note\n";
    for (const can::GridSearchRow& row : result.table) {
      table << fmt(row.alpha) << ',' << row.depth << ',' << fmt(row.tau) << ','
            << (row.valid ? 1 : 0) << ',' << (row.valid ? fmt(row.objective) : std::string())
            << ',' << row.note << '\n';
    }
  }
  {
    std::ofstream best = open_output(out / "best.csv");
    best << "alpha,depth,tau,objective,value\n";
    best << fmt(result.best_alpha) << ',' << result.best_depth << ','
         << fmt(result.best_tau) << ',' << objective_name << ','
         << fmt(result.best_objective) << '\n';
  }
  std::cout << "best: alpha=" << fmt(result.best_alpha) << " depth=" << result.best_depth
            << " tau=" << fmt(result.best_tau) << " (" << objective_name << " = "
            << fmt(result.best_objective) << ")\n";
  return 0;
}

can::SimulationConfig load_simulation_config(const std::string& config_path) {
  can::SimulationConfig cfg = can::SimulationConfig::defaults();
  if (config_path.empty()) return cfg;
  std::ifstream in(config_path);
  if (!in) throw can::InvalidInput("cannot open " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw can::InvalidInput("malformed config " + config_path + ": " + e.what());
  }
  try {
    if (j.contains("m_values")) cfg.m_values = j["m_values"].get<std::vector<std::size_t>>();
    if (j.contains("alphas")) cfg.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
    if (j.contains("depth")) cfg.depth = j["depth"].get<std::size_t>();
    if (j.contains("k_max")) cfg.k_max = j["k_max"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw can::InvalidInput("invalid config field in " + config_path + ": " + e.what());
  }
  return cfg;
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out_dir, std::size_t threads) {
  can::SimulationConfig cfg = load_simulation_config(config_path);
  if (seed) cfg.seed = *seed;
  cfg.validate();

  const can::SimulationReport report = can::run_grid(cfg, threads);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  {
    std::ofstream cells = open_output(out / "simulation_cells.csv");
    can::write_cells_csv(cells, report);
  }
  {
    std::ofstream summary = open_output(out / "simulation_summary.csv");
    can::write_summary_csv(summary, report);
  }
  std::size_t failures = 0;
  for (const can::CellStats& c : report.cells) failures += c.failures;
  std::cout << "simulated " << report.cells.size() << " cell(s), " << failures
            << " trial(s) lost to sampling exhaustion\n";
  std::cout << "wrote " << (out / "simulation_cells.csv").string() << " and "
            << (out / "simulation_summary.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classification post-processing via alternating normalization"};
  app.require_subcommand(1);

  // adjust
  auto* adjust = app.add_subcommand("adjust", "re-adjust test predictions");
  std::string a_val_preds, a_val_labels, a_test_preds, a_test_labels, a_train_labels;
  std::string a_mode = "single", a_out = ".";
  double a_alpha = 1.0, a_tau = 0.5, a_smoothing = 0.0;
  std::size_t a_depth = 1, a_k_max = 10, a_threads = 1;
  bool a_allow_self = false;
  adjust->add_option("--val-preds", a_val_preds, "validation predictions CSV")->required();
  adjust->add_option("--val-labels", a_val_labels, "validation gold labels")->required();
  adjust->add_option("--test-preds", a_test_preds, "test predictions CSV")->required();
  adjust->add_option("--test-labels", a_test_labels, "test gold labels (optional)");
  adjust->add_option("--train-labels", a_train_labels, "training labels for priors")->required();
  adjust->add_option("--mode", a_mode, "single or multi")->required();
  adjust->add_option("--alpha", a_alpha, "exponent (> 0)")->required();
  adjust->add_option("--depth", a_depth, "iteration count (>= 1)")->required();
  adjust->add_option("--tau", a_tau, "ambiguity threshold in [0, 1]")->required();
  adjust->add_option("--k-max", a_k_max, "top-k scan bound (default 10, clamped to m)");
  adjust->add_option("--prior-smoothing", a_smoothing, "additive prior smoothing (default 0)");
  adjust->add_option("--out", a_out, "output directory")->required();
  adjust->add_option("--threads", a_threads, "worker threads (default 1)");
  adjust->add_flag("--allow-self-reference", a_allow_self,
                   "allow the reference set to come from the file being adjusted");

  // tune
  auto* tune = app.add_subcommand("tune", "grid-search alpha, depth, tau on validation");
  std::string t_val_preds, t_val_labels, t_train_labels;
  std::string t_mode = "single", t_out = ".", t_alpha_grid, t_depth_grid, t_tau_grid;
  std::string t_objective = "macro_f1";
  double t_smoothing = 0.0;
  std::size_t t_k_max = 10, t_threads = 1;
  tune->add_option("--val-preds", t_val_preds, "validation predictions CSV")->required();
  tune->add_option("--val-labels", t_val_labels, "validation gold labels")->required();
  tune->add_option("--train-labels", t_train_labels, "training labels for priors")->required();
  tune->add_option("--mode", t_mode, "single or multi")->required();
  tune->add_option("--alpha-grid", t_alpha_grid, "default 0.1:0.9:0.1,1:35:1");
  tune->add_option("--depth-grid", t_depth_grid, "default 1:5");
  tune->add_option("--tau-grid", t_tau_grid, "default 0.25,0.5,0.75");
  tune->add_option("--objective", t_objective, "macro_f1, micro_f1, or top1")->required();
  tune->add_option("--k-max", t_k_max, "top-k scan bound (default 10, clamped to m)");
  tune->add_option("--prior-smoothing", t_smoothing, "additive prior smoothing (default 0)");
  tune->add_option("--out", t_out, "output directory")->required();
  tune->add_option("--threads", t_threads, "worker threads (default 1)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study on random matrices");
  std::string s_config, s_out = ".";
  std::uint64_t s_seed = 0;
  bool s_seed_set = false;
  std::size_t s_threads = 1;
  simulate->add_option("--config", s_config, "JSON config (defaults used when omitted)");
  simulate->add_option("--seed", s_seed, "RNG seed (overrides config)")
      ->each([&](const std::string&) { s_seed_set = true; });
  simulate->add_option("--out", s_out, "output directory")->required();
  simulate->add_option("--threads", s_threads, "worker threads (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (adjust->parsed()) {
      return run_adjust(a_val_preds, a_val_labels, a_test_preds, a_test_labels,
                        a_train_labels, a_mode, a_alpha, a_depth, a_tau, a_k_max,
                        a_smoothing, a_out, a_threads, a_allow_self);
    }
    if (tune->parsed()) {
      return run_tune(t_val_preds, t_val_labels, t_train_labels, t_mode, t_alpha_grid,
                      t_depth_grid, t_tau_grid, t_objective, t_k_max, t_smoothing, t_out,
                      t_threads);
    }
    if (simulate->parsed()) {
      return run_simulate(s_config, s_seed_set ? std::optional<std::uint64_t>(s_seed)
                                               : std::nullopt,
                          s_out, s_threads);
    }
  } catch (const can::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const can::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
