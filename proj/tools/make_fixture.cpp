// Generates the bundled synthetic single-label fixture used by the
// integration tests, then verifies the construction by running the full
// default grid search on the files it wrote.
//
// The validation split mixes four populations over three classes:
//   - confident near-one-hot rows (ambiguity < 0.25) that form the
//     reference set at every tau in the default grid;
//   - "flip" rows: argmax on class 0, gold class 1, with a margin chosen
//     so the class-1 prior/column-sum boost corrects them at alpha = 2,
//     depth = 1 but not at alpha >= 3;
//   - "keep" rows: argmax = gold = class 0 with a wider margin that
//     survives alpha = 2 but is dragged off the gold class by any
//     alpha <= 1;
//   - "fragile keep" rows: like keep rows but with the margin inside the
//     measured window where one alpha = 2 iteration preserves the winner
//     while (alpha = 0.5, depth = 2) and (alpha = 2, depth = 2) both
//     overshoot it;
//   - "decoy" rows: correct, ambiguity in (0.25, 0.5], so they are only
//     gated at tau = 0.25, where the thin class-2 reference mass flips
//     them away from gold.
// Keep rows rule out every alpha below 2, fragile keeps rule out the
// depth>1 escapes at small alpha, decoys rule out tau = 0.25, and flip
// rows (ambiguity in (0.5, 0.75]) rule out tau = 0.75, so the
// lexicographic tie-break lands on (alpha, depth, tau) = (2, 1, 0.5).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "can/metrics.hpp"
#include "can/pipeline.hpp"
#include "can/prediction_io.hpp"
#include "can/rng.hpp"
#include "can/types.hpp"

namespace fs = std::filesystem;

namespace {

struct Example {
  std::string id;
  std::vector<double> scores;
  std::size_t gold;
};

constexpr std::size_t kConfident0 = 150;
constexpr std::size_t kConfident1 = 60;
constexpr std::size_t kConfident2 = 2;
constexpr std::size_t kDecoys = 80;
constexpr std::size_t kFlips = 84;
constexpr std::size_t kKeeps = 84;
constexpr std::size_t kFragileKeeps = 40;

double jitter(can::SplitMix64& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_double();
}

std::vector<double> confident_row(can::SplitMix64& rng, std::size_t peak) {
  const double p = jitter(rng, 0.96, 0.98);
  const double rest = 1.0 - p;
  const double split = jitter(rng, 0.55, 0.75);
  std::vector<double> row(3, 0.0);
  row[peak] = p;
  row[(peak + 1) % 3] = rest * split;
  row[(peak + 2) % 3] = rest * (1.0 - split);
  return row;
}

// Two-way contest between `top` and `runner` with ratio rho, and a tiny
// residual on the remaining class.
std::vector<double> contest_row(std::size_t top, std::size_t runner, double rho,
                                double residual) {
  std::vector<double> row(3, 0.0);
  const double mass = 1.0 - residual;
  row[top] = mass / (1.0 + rho);
  row[runner] = mass * rho / (1.0 + rho);
  for (std::size_t j = 0; j < 3; ++j) {
    if (j != top && j != runner) row[j] = residual;
  }
  return row;
}

std::vector<Example> build_split(const std::string& prefix, can::SplitMix64& rng) {
  std::vector<Example> out;
  auto add = [&](std::vector<double> scores, std::size_t gold) {
    Example e;
    e.id = prefix + "-" + std::to_string(out.size() + 1);
    e.scores = std::move(scores);
    e.gold = gold;
    out.push_back(std::move(e));
  };

  for (std::size_t i = 0; i < kConfident0; ++i) add(confident_row(rng, 0), 0);
  for (std::size_t i = 0; i < kConfident1; ++i) add(confident_row(rng, 1), 1);
  for (std::size_t i = 0; i < kConfident2; ++i) add(confident_row(rng, 2), 2);
  // decoys: class 0 vs class 2, ambiguity in (0.25, 0.5]
  for (std::size_t i = 0; i < kDecoys; ++i) {
    add(contest_row(0, 2, jitter(rng, 0.23, 0.26), 0.005), 0);
  }
  // flips: wrong argmax, corrected only near alpha/depth = 2
  for (std::size_t i = 0; i < kFlips; ++i) {
    add(contest_row(0, 1, jitter(rng, 0.72, 0.78), 0.002), 1);
  }
  // keeps: correct argmax, lost under any alpha <= 1
  for (std::size_t i = 0; i < kKeeps; ++i) {
    add(contest_row(0, 1, jitter(rng, 0.55, 0.61), 0.002), 0);
  }
  // fragile keeps: survive exactly one alpha = 2 iteration
  for (std::size_t i = 0; i < kFragileKeeps; ++i) {
    add(contest_row(0, 1, jitter(rng, 0.68, 0.695), 0.002), 0);
  }
  return out;
}

void write_predictions_csv(const fs::path& path, const std::vector<Example>& examples,
                           const std::vector<std::string>& classes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "id";
  for (const auto& c : classes) out << ',' << c;
  out << '\n';
  char buf[64];
  for (const Example& e : examples) {
    out << e.id;
    for (double v : e.scores) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_labels_csv(const fs::path& path, const std::vector<Example>& examples,
                      const std::vector<std::string>& classes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const Example& e : examples) out << e.id << ',' << classes[e.gold] << '\n';
}

void write_train_labels(const fs::path& path, const std::vector<std::string>& classes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::size_t id = 0;
  auto emit = [&](std::size_t cls, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      out << "train-" << ++id << ',' << classes[cls] << '\n';
    }
  };
  emit(0, 50);  // priors 0.5 / 0.3 / 0.2
  emit(1, 30);
  emit(2, 20);
}

int verify(const fs::path& dir) {
  using namespace can;
  const PredictionFile val =
      load_predictions(dir / "val_predictions.csv", TaskMode::kSingleLabel);
  const PredictionFile test =
      load_predictions(dir / "test_predictions.csv", TaskMode::kSingleLabel);
  const LabelFile val_labels = load_labels(dir / "val_labels.csv", TaskMode::kSingleLabel);
  const LabelFile test_labels =
      load_labels(dir / "test_labels.csv", TaskMode::kSingleLabel);
  const PriorVector priors =
      compute_priors(dir / "train_labels.csv", val.class_names, TaskMode::kSingleLabel);

  const GridSearchResult result = grid_search(val, val_labels, priors, GridSpec::defaults(),
                                              Objective::kTop1Accuracy, 10, 4);
  std::cout << "grid best: alpha=" << result.best_alpha << " depth=" << result.best_depth
            << " tau=" << result.best_tau << " top1=" << result.best_objective << "\n";
  std::size_t at_best = 0;
  for (const auto& row : result.table) {
    if (row.valid && row.objective == result.best_objective) {
      ++at_best;
      if (at_best <= 40) {
        std::cout << "  tied: alpha=" << row.alpha << " depth=" << row.depth
                  << " tau=" << row.tau << "\n";
      }
    }
  }
  std::cout << "combinations tied at the best objective: " << at_best << "\n";

  bool ok = result.best_alpha == 2.0 && result.best_depth == 1 && result.best_tau == 0.5;
  if (result.best_objective != 1.0) {
    std::cout << "FAIL: planted combination does not reach top1 = 1\n";
    ok = false;
  }

  const CanHyperParams planted{2.0, 1, 0.5, 10};
  const ApplyResult applied = apply_can(test, val, priors, planted, 1);
  const auto gold = resolve_label_sets(test_labels, test.ids, test.class_names);
  const double before = score_objective(test, gold, Objective::kTop1Accuracy);
  const double after = score_objective(applied.adjusted, gold, Objective::kTop1Accuracy);
  std::cout << "test top1 before=" << before << " after=" << after << " (adjusted "
            << applied.challenging_count << " rows)\n";
  if (after != 1.0) {
    std::cout << "FAIL: planted hyperparameters do not fix the test split\n";
    ok = false;
  }
  if (!ok) std::cout << "FAIL: fixture verification failed\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("tests/fixtures");
  fs::create_directories(dir);
  const std::vector<std::string> classes = {"c0", "c1", "c2"};

  can::SplitMix64 rng{20240617u};
  const std::vector<Example> val = build_split("val", rng);
  const std::vector<Example> test = build_split("test", rng);

  write_predictions_csv(dir / "val_predictions.csv", val, classes);
  write_labels_csv(dir / "val_labels.csv", val, classes);
  write_predictions_csv(dir / "test_predictions.csv", test, classes);
  write_labels_csv(dir / "test_labels.csv", test, classes);
  write_train_labels(dir / "train_labels.csv", classes);
  std::cout << "wrote fixture (" << val.size() << " val / " << test.size()
            << " test examples) to " << dir.string() << "\n";

  return verify(dir);
}
