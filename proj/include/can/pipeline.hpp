#ifndef CAN_PIPELINE_HPP_
#define CAN_PIPELINE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "can/metrics.hpp"
#include "can/prediction_io.hpp"
#include "can/types.hpp"

namespace can {

enum class Objective { kLooseMacroF1, kLooseMicroF1, kTop1Accuracy };

Objective objective_from_name(const std::string& name);
std::string objective_name(Objective objective);

// Hyperparameter grids. Value grids parse from strings like
// "0.1:0.9:0.1,1:35:1" (comma-separated scalars or lo:hi[:step] ranges).
struct GridSpec {
  std::vector<double> alphas;
  std::vector<std::size_t> depths;
  std::vector<double> taus;

  // alpha {0.1..0.9, 1..35}, depth {1..5}, tau {0.25, 0.5, 0.75}
  static GridSpec defaults();
};

std::vector<double> parse_value_grid(const std::string& spec);
std::vector<std::size_t> parse_count_grid(const std::string& spec);

struct GridSearchRow {
  double alpha = 0.0;
  std::size_t depth = 0;
  double tau = 0.0;
  bool valid = false;
  double objective = 0.0;
  std::string note;
};

struct GridSearchResult {
  double best_alpha = 0.0;
  std::size_t best_depth = 0;
  double best_tau = 0.0;
  double best_objective = 0.0;
  std::vector<GridSearchRow> table;  // lexicographic (alpha, depth, tau) order
};

// Predicted label sets under the file's task mode: {argmax} per example
// for single-label, thresholded sets for multilabel.
std::vector<LabelSet> predicted_label_sets(const PredictionFile& preds);

double score_objective(const PredictionFile& preds, const std::vector<LabelSet>& gold,
                       Objective objective);

// For each grid combination: gate the validation set at tau, build the
// reference from its confident part, re-adjust the challenging part, and
// score the full set. Combinations whose tau leaves no confident example
// are recorded as invalid rather than failing the search. Ties break
// toward smaller alpha, then depth, then tau.
GridSearchResult grid_search(const PredictionFile& val_preds, const LabelFile& val_labels,
                             const PriorVector& priors, const GridSpec& grids,
                             Objective objective, std::size_t k_max = 10,
                             std::size_t threads = 1);

struct AdjustRecord {
  std::string id;
  std::string class_name;  // empty in single-label mode
  double delta = 0.0;
  bool flipped = false;
};

struct ApplyResult {
  PredictionFile adjusted;
  std::vector<AdjustRecord> gains;  // challenging items, input order
  std::size_t challenging_count = 0;
  std::size_t reference_rows = 0;
};

// Re-adjust the challenging part of `preds` against a reference built
// from the confident part of `val_preds` at hp.tau. Confident rows pass
// through bitwise. Class headers must match.
ApplyResult apply_can(const PredictionFile& preds, const PredictionFile& val_preds,
                      const PriorVector& priors, const CanHyperParams& hp,
                      std::size_t threads = 1);

}  // namespace can

#endif  // CAN_PIPELINE_HPP_
