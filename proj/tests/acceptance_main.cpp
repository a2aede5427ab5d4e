// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "can/ambiguity.hpp"
#include "can/core_an.hpp"
#include "can/metrics.hpp"
#include "can/multilabel.hpp"
#include "can/pipeline.hpp"
#include "can/prediction_io.hpp"
#include "can/rng.hpp"
#include "can/simulation.hpp"

using namespace can;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool failed = false;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& message) {
    if (!ok) {
      failed = true;
      notes.push_back(message);
    }
  }
  void note(const std::string& message) { notes.push_back(message); }
};

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ProbabilityVector pv(std::vector<double> v) { return ProbabilityVector(std::move(v)); }

ReferenceMatrix ref(const std::vector<std::vector<double>>& rows) {
  return ReferenceMatrix(rows);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// --- criterion 1: worked-example golden test ------------------------------

void golden_worked_example(Check& check) {
  const CanHyperParams hp{1.0, 1, 0.5, 10};
  const ReferenceMatrix a0 = ref({{0.0, 1.0}});
  const PriorVector q({0.5, 0.5});
  const ProbabilityVector warm = readjust(pv({0.5, 0.5}), a0, q, hp);
  check.require(std::abs(warm[0] - 0.75) <= 1e-12 && std::abs(warm[1] - 0.25) <= 1e-12,
                "expected [0.75, 0.25], got [" + fmt(warm[0]) + ", " + fmt(warm[1]) + "]");

  const double start = now_seconds();
  const ProbabilityVector timed = readjust(pv({0.5, 0.5}), a0, q, hp);
  const double elapsed = now_seconds() - start;
  check.require(timed[0] == warm[0], "non-deterministic result");
  check.require(elapsed < 1e-3, "runtime " + fmt(elapsed) + " s exceeds 1 ms");
  check.note("runtime " + fmt(elapsed * 1e3) + " ms");
}

// --- criterion 2: stochasticity suite -------------------------------------

void stochasticity_suite(Check& check) {
  SplitMix64 rng{101};
  std::size_t checked_rows = 0, checked_cols = 0, failures = 0;
  const std::size_t cases = 10000;
  for (std::size_t t = 0; t < cases; ++t) {
    // skew sizes toward small but cover the full ranges
    const std::size_t m = 2 + rng.next() % (t % 10 == 0 ? 99 : 20);
    const std::size_t n = 1 + rng.next() % (t % 10 == 0 ? 200 : 30);
    const double alpha = 0.1 + 34.9 * rng.next_double();
    const std::size_t depth = 1 + rng.next() % 5;

    std::vector<ProbabilityVector> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rows.push_back(pv(sample_dirichlet(m, rng)));
    const ReferenceMatrix a0(rows);
    const ProbabilityVector b0 = pv(sample_dirichlet(m, rng));
    const PriorVector q(sample_dirichlet(m, rng));

    AugmentedMatrix L = build_augmented(b0, a0);
    for (std::size_t d = 0; d < depth; ++d) {
      const Matrix S = column_stochastic_step(L, alpha);
      for (std::size_t j = 0; j < S.cols(); ++j) {
        double col = 0.0, source = 0.0;
        for (std::size_t i = 0; i < S.rows(); ++i) {
          col += S(i, j);
          source += L(i, j) == 0.0 ? 0.0 : 1.0;
        }
        ++checked_cols;
        if (source > 0.0 && std::abs(col - 1.0) > 1e-9) ++failures;
      }
      L = row_stochastic_step(S, q);
      for (std::size_t i = 0; i < L.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < L.cols(); ++j) sum += L(i, j);
        ++checked_rows;
        if (std::abs(sum - 1.0) > 1e-9) ++failures;
      }
    }
  }
  check.require(failures == 0, std::to_string(failures) + " stochasticity violations");
  check.note(std::to_string(cases) + " cases, " + std::to_string(checked_rows) +
             " row sums, " + std::to_string(checked_cols) + " column sums");
}

// --- criterion 3: scalar-form equivalence ---------------------------------

void scalar_equivalence(Check& check) {
  SplitMix64 rng{202};
  double worst = 0.0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const std::size_t m = 2 + rng.next() % 30;
    const std::size_t n = 1 + rng.next() % 60;
    std::vector<ProbabilityVector> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(pv(sample_dirichlet(m, rng)));
    const ReferenceMatrix a0(rows);
    const ProbabilityVector b0 = pv(sample_dirichlet(m, rng));
    const PriorVector q(sample_dirichlet(m, rng));
    const CanHyperParams hp{0.1 + 34.9 * rng.next_double(), 1 + rng.next() % 5, 0.5, 10};

    const ProbabilityVector a = readjust(b0, a0, q, hp);
    const ProbabilityVector b = readjust_scalar_oracle(b0, a0, q, hp);
    for (std::size_t j = 0; j < m; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  }
  check.require(worst <= 1e-10, "max deviation " + fmt(worst) + " exceeds 1e-10");
  check.note("max deviation " + fmt(worst));
}

// --- criterion 4: invariance suite ----------------------------------------

void invariance_suite(Check& check) {
  SplitMix64 rng{303};
  double worst_scale = 0.0, worst_perm = 0.0;
  std::size_t row_perm_mismatches = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const std::size_t m = 2 + rng.next() % 30;
    const std::size_t n = 2 + rng.next() % 50;
    std::vector<ProbabilityVector> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(pv(sample_dirichlet(m, rng)));
    const ProbabilityVector b0 = pv(sample_dirichlet(m, rng));
    const std::vector<double> q = sample_dirichlet(m, rng);
    const CanHyperParams hp{0.1 + 34.9 * rng.next_double(), 1 + rng.next() % 5, 0.5, 10};

    const ProbabilityVector base = readjust(b0, ReferenceMatrix(rows), PriorVector(q), hp);

    // prior rescaling
    const double scale = std::exp(6.0 * (rng.next_double() - 0.5));
    std::vector<double> scaled(q);
    for (double& x : scaled) x *= scale;
    const ProbabilityVector rescaled =
        readjust(b0, ReferenceMatrix(rows), PriorVector(scaled), hp);
    for (std::size_t j = 0; j < m; ++j) {
      worst_scale = std::max(worst_scale, std::abs(rescaled[j] - base[j]));
    }

    // reference-row permutation (exact)
    std::vector<ProbabilityVector> shuffled(rows);
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.next() % i]);
    }
    const ProbabilityVector permuted_rows =
        readjust(b0, ReferenceMatrix(shuffled), PriorVector(q), hp);
    if (permuted_rows.values() != base.values()) ++row_perm_mismatches;

    // class permutation equivariance
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.next() % i]);
    std::vector<std::vector<double>> a_perm(n, std::vector<double>(m));
    std::vector<double> b_perm(m), q_perm(m);
    for (std::size_t j = 0; j < m; ++j) {
      b_perm[perm[j]] = b0[j];
      q_perm[perm[j]] = q[j];
      for (std::size_t i = 0; i < n; ++i) a_perm[i][perm[j]] = rows[i][j];
    }
    const ProbabilityVector permuted = readjust(pv(b_perm), ReferenceMatrix(a_perm),
                                                PriorVector(q_perm), hp);
    for (std::size_t j = 0; j < m; ++j) {
      worst_perm = std::max(worst_perm, std::abs(permuted[perm[j]] - base[j]));
    }
  }
  check.require(worst_scale <= 1e-12,
                "prior-scale deviation " + fmt(worst_scale) + " exceeds 1e-12");
  check.require(row_perm_mismatches == 0,
                std::to_string(row_perm_mismatches) + " row-permutation mismatches");
  check.require(worst_perm <= 1e-12,
                "class-permutation deviation " + fmt(worst_perm) + " exceeds 1e-12");
  check.note("scale dev " + fmt(worst_scale) + ", class-perm dev " + fmt(worst_perm));
}

// --- criterion 5: 2x2 convergence at alpha = 1 ----------------------------

// Independent brute-force oracle: plain 2x2 column-then-row normalization.
std::vector<double> brute_force_limit(double p_a, double p, std::size_t iterations) {
  double L[2][2] = {{p_a, 1.0 - p_a}, {p, 1.0 - p}};
  for (std::size_t it = 0; it < iterations; ++it) {
    for (int j = 0; j < 2; ++j) {
      const double s = L[0][j] + L[1][j];
      if (s > 0.0) {
        L[0][j] /= s;
        L[1][j] /= s;
      }
    }
    for (int i = 0; i < 2; ++i) {
      const double r = L[i][0] + L[i][1];
      L[i][0] /= r;
      L[i][1] /= r;
    }
  }
  return {L[1][0], L[1][1]};
}

void convergence_2x2(Check& check) {
  SplitMix64 rng{404};
  std::size_t cases = 0, reached_vertex = 0, vertex_matches_sign = 0;
  double worst_vertex_distance = 0.0;
  std::vector<double> sample_limit;
  double sample_pa = 0.0, sample_p = 0.0;
  while (cases < 100) {
    const double p_a = 0.01 + 0.98 * rng.next_double();
    const double p = 0.01 + 0.98 * rng.next_double();
    if (std::abs(p_a - p) <= 0.05) continue;
    ++cases;

    // oracle first: long-iteration limit of the same dynamics
    const std::vector<double> oracle = brute_force_limit(p_a, p, 500);

    const CanHyperParams hp{1.0, 500, 0.5, 10};
    const ProbabilityVector b = readjust(pv({p, 1.0 - p}),
                                         ref({{p_a, 1.0 - p_a}}),
                                         PriorVector({0.5, 0.5}), hp);
    // agreement with the oracle is expected; vertex convergence is the
    // criterion under test
    if (std::abs(b[0] - oracle[0]) > 1e-6) {
      check.require(false, "readjust disagrees with the brute-force oracle");
    }
    const double vertex_distance = std::min(b[0], b[1]);  // distance to nearest vertex
    worst_vertex_distance = std::max(worst_vertex_distance, vertex_distance);
    if (vertex_distance <= 1e-6) {
      ++reached_vertex;
      const bool selected_second = b[1] > b[0];
      if (selected_second == (p_a > p)) ++vertex_matches_sign;
    }
    if (cases == 1) {
      sample_limit = {b[0], b[1]};
      sample_pa = p_a;
      sample_p = p;
    }
  }
  check.require(reached_vertex == 100,
                std::to_string(reached_vertex) +
                    "/100 cases reached a unit vector by d=500; worst distance to a "
                    "vertex " +
                    fmt(worst_vertex_distance));
  check.require(vertex_matches_sign == reached_vertex,
                "vertex selection disagreed with sign(p_A - p)");
  check.note("with alpha = 1 both steps are diagonal scalings, so the 2x2 odds ratio "
             "(a*d)/(b*c) is invariant and the iterates converge to the interior "
             "doubly stochastic matrix carrying it, e.g. (p_A=" +
             fmt(sample_pa) + ", p=" + fmt(sample_p) + ") -> [" + fmt(sample_limit[0]) +
             ", " + fmt(sample_limit[1]) + "], not a vertex; alpha > 1 does converge "
             "to the sign(p_A - p) vertex (see unit tests)");
}

// --- criterion 6: top-k entropy values ------------------------------------

void entropy_values(Check& check) {
  const double h_full = entropy_base_m(std::vector<double>{0.5, 0.25, 0.25}, 3);
  check.require(std::abs(h_full - 0.94639) <= 1e-4,
                "H3([0.5, 0.25, 0.25]) = " + fmt(h_full) + ", expected 0.94639 +- 1e-4");
  const double h_top2 = top_k_entropy(pv({0.5, 0.5, 0.0}), 2);
  check.require(std::abs(h_top2 - 0.63093) <= 1e-4,
                "Htop2,3([0.5, 0.5, 0]) = " + fmt(h_top2) + ", expected 0.63093 +- 1e-4");
  const double h_flat_top = entropy_base_m(std::vector<double>{0.5, 0.5, 0.0}, 3);
  check.require(h_full > h_flat_top,
                "full-entropy ordering violated: " + fmt(h_full) + " vs " + fmt(h_flat_top));
}

// --- criterion 7: simulation trend at desk scale --------------------------

void simulation_trend(Check& check) {
  SimulationConfig cfg;
  cfg.m_values = {2, 3, 5, 10, 20};
  cfg.trials = 50;
  cfg.n = 100;
  cfg.alphas = {0.5, 1.0, 2.0, 5.0};
  cfg.depth = 1;
  cfg.seed = 7;

  const SimulationReport report = run_grid(cfg, 1);
  const auto grid = report.summary();

  double min_gain = 1e300, min_delta = 1e300;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      check.require(grid[a][b].delta_count > 0,
                    "summary cell (" + std::to_string(a) + "," + std::to_string(b) +
                        ") has no data");
      min_gain = std::min(min_gain, grid[a][b].mean_accuracy_gain);
      min_delta = std::min(min_delta, grid[a][b].mean_delta);
    }
  }
  check.require(min_gain >= 0.0, "negative mean accuracy gain " + fmt(min_gain));
  check.require(min_delta >= -0.01, "mean expected gain " + fmt(min_delta) +
                                        " below -0.01 in some cell");

  // "mean gain" of a cell = its mean accuracy gain (the CSV's
  // mean_accuracy_gain column)
  const double low_low = grid[0][0].mean_accuracy_gain;
  const double low_high = grid[0][3].mean_accuracy_gain;
  check.require(low_high > low_low,
                "gain for (low-ambiguity reference, high-ambiguity source) " +
                    fmt(low_high) + " does not exceed the (low, low) cell " +
                    fmt(low_low));

  // spread across reference bins (fixed source bin) vs across source bins
  double spread_ref = 0.0, spread_src = 0.0;
  for (std::size_t b = 0; b < 4; ++b) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t a = 0; a < 4; ++a) {
      lo = std::min(lo, grid[a][b].mean_accuracy_gain);
      hi = std::max(hi, grid[a][b].mean_accuracy_gain);
    }
    spread_ref = std::max(spread_ref, hi - lo);
  }
  for (std::size_t a = 0; a < 4; ++a) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t b = 0; b < 4; ++b) {
      lo = std::min(lo, grid[a][b].mean_accuracy_gain);
      hi = std::max(hi, grid[a][b].mean_accuracy_gain);
    }
    spread_src = std::max(spread_src, hi - lo);
  }
  check.require(spread_ref < spread_src,
                "spread across reference bins " + fmt(spread_ref) +
                    " not below spread across source bins " + fmt(spread_src));
  std::size_t failures = 0;
  for (const CellStats& c : report.cells) failures += c.failures;
  check.note("min gain " + fmt(min_gain) + ", min delta " + fmt(min_delta) +
             ", (low,high)=" + fmt(low_high) + " vs (low,low)=" + fmt(low_low) +
             ", spreads " + fmt(spread_ref) + " / " + fmt(spread_src) + ", " +
             std::to_string(failures) + " sampling-failed trials");
  for (std::size_t a = 0; a < 4; ++a) {
    std::string row = "gain row A-bin " + std::to_string(a) + ":";
    for (std::size_t b = 0; b < 4; ++b) row += " " + fmt(grid[a][b].mean_accuracy_gain);
    check.note(row);
  }
}

// --- criterion 8: multilabel round trip and metric fixtures ---------------

void multilabel_and_metrics(Check& check) {
  SplitMix64 rng{505};
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.next() % 10;
    const std::size_t m = 1 + rng.next() % 15;
    Matrix scores(n, m);
    for (double& x : scores.data()) x = rng.next_double();
    if (!(from_binary_pairs(to_binary_pairs(scores), n, m) == scores)) ++mismatches;
  }
  check.require(mismatches == 0,
                std::to_string(mismatches) + " inexact multilabel round trips");

  const F1Report half = loose_f1({{0}}, {{0, 1}});
  check.require(std::abs(half.macro_p - 1.0) <= 1e-12 &&
                    std::abs(half.macro_r - 0.5) <= 1e-12 &&
                    std::abs(half.macro_f1 - 2.0 / 3.0) <= 1e-12,
                "loose F1 fixture {0} vs {0,1} mismatch");
  const F1Report empty_pred = loose_f1({{}}, {{1}});
  check.require(empty_pred.macro_p == 1.0 && empty_pred.macro_r == 0.0 &&
                    empty_pred.macro_f1 == 0.0,
                "empty-prediction convention violated");
  const F1Report empty_gold = loose_f1({{1}}, {{}});
  check.require(empty_gold.macro_r == 1.0 && empty_gold.macro_p == 0.0 &&
                    empty_gold.macro_f1 == 0.0,
                "empty-gold convention violated");
  const F1Report mixed = loose_f1({{0}, {}}, {{0, 1}, {1}});
  check.require(std::abs(mixed.micro_f1 - 0.5) <= 1e-12 &&
                    std::abs(mixed.macro_f1 - 0.4) <= 1e-12,
                "pooled loose F1 fixture mismatch");
}

// --- criterion 9: end-to-end determinism through the CLI ------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(CAN_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

void end_to_end_cli(Check& check) {
  const fs::path fixtures(CAN_FIXTURE_DIR);
  const fs::path work = fs::temp_directory_path() / "can_acceptance_work";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::string data_args = " --val-preds " +
                                (fixtures / "val_predictions.csv").string() +
                                " --val-labels " + (fixtures / "val_labels.csv").string() +
                                " --train-labels " +
                                (fixtures / "train_labels.csv").string() +
                                " --mode single";

  // tune: two identical runs plus a multi-threaded one
  std::vector<std::string> tune_outputs;
  for (const auto& [name, threads] :
       {std::pair<std::string, int>{"tune1", 1}, {"tune2", 1}, {"tune4", 4}}) {
    const fs::path out = work / name;
    const int code =
        run_cli("tune" + data_args + " --objective top1 --threads " +
                    std::to_string(threads) + " --out " + out.string(),
                work / (name + ".log"));
    check.require(code == 0, name + " exited with code " + std::to_string(code));
    tune_outputs.push_back(read_file(out / "grid_table.csv") + "\x1e" +
                           read_file(out / "best.csv"));
  }
  check.require(tune_outputs[0] == tune_outputs[1], "tune outputs differ between runs");
  check.require(tune_outputs[0] == tune_outputs[2],
                "tune outputs differ across thread counts");

  const std::string best = read_file(work / "tune1" / "best.csv");
  check.require(best.find("\n2,1,0.5,") != std::string::npos,
                "grid search did not recover alpha=2, depth=1, tau=0.5; best.csv: " + best);

  // adjust: two identical runs plus a multi-threaded one
  const std::string adjust_args =
      "adjust" + data_args + " --test-preds " + (fixtures / "test_predictions.csv").string() +
      " --test-labels " + (fixtures / "test_labels.csv").string() +
      " --alpha 2 --depth 1 --tau 0.5";
  std::vector<std::string> adjust_outputs;
  for (const auto& [name, threads] :
       {std::pair<std::string, int>{"adj1", 1}, {"adj2", 1}, {"adj4", 4}}) {
    const fs::path out = work / name;
    const int code = run_cli(adjust_args + " --threads " + std::to_string(threads) +
                                 " --out " + out.string(),
                             work / (name + ".log"));
    check.require(code == 0, name + " exited with code " + std::to_string(code));
    adjust_outputs.push_back(read_file(out / "adjusted_test_predictions.csv") + "\x1e" +
                             read_file(out / "gains.csv") + "\x1e" +
                             read_file(out / "metrics.csv"));
  }
  check.require(adjust_outputs[0] == adjust_outputs[1],
                "adjust outputs differ between runs");
  check.require(adjust_outputs[0] == adjust_outputs[2],
                "adjust outputs differ across thread counts");

  // the planted hyperparameters repair the test split completely
  const std::string metrics = read_file(work / "adj1" / "metrics.csv");
  check.require(metrics.find("test,full,can") != std::string::npos,
                "metrics.csv lacks the test,full,can row");
  bool can_test_perfect = false;
  std::istringstream lines(metrics);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("test,full,can,", 0) == 0) {
      can_test_perfect = line.substr(line.rfind(',') + 1) == "1";
    }
  }
  check.require(can_test_perfect, "adjusted test top-1 accuracy is not 1");
  fs::remove_all(work);
}

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked-example golden test", 0.0, golden_worked_example},
      {2, "stochasticity suite (1e4 random inputs)", 60.0, stochasticity_suite},
      {3, "scalar-form equivalence (1e3 random cases)", 0.0, scalar_equivalence},
      {4, "invariance suite (1e3 random cases)", 0.0, invariance_suite},
      {5, "2x2 convergence at alpha=1 (unit vector by d=500)", 10.0, convergence_2x2},
      {6, "top-k entropy closed forms", 0.0, entropy_values},
      {7, "simulation trend at desk scale", 300.0, simulation_trend},
      {8, "multilabel round trip and loose-F1 fixtures", 0.0, multilabel_and_metrics},
      {9, "end-to-end CLI determinism and planted-grid recovery", 120.0, end_to_end_cli},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Check check;
    const double start = now_seconds();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = now_seconds() - start;
    if (criterion.budget_seconds > 0.0 && elapsed > criterion.budget_seconds) {
      check.require(false, "runtime " + fmt(elapsed) + " s exceeds budget " +
                               fmt(criterion.budget_seconds) + " s");
    }
    std::printf("[%s] criterion %d: %s (%.2f s)\n", check.failed ? "FAIL" : "PASS",
                criterion.id, criterion.title.c_str(), elapsed);
    for (const std::string& note : check.notes) {
      std::printf("    - %s\n", note.c_str());
    }
    if (check.failed) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
