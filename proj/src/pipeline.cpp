#include "can/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>

#include "can/ambiguity.hpp"
#include "can/core_an.hpp"
#include "can/multilabel.hpp"
#include "can/parallel.hpp"

namespace can {

namespace {

std::vector<ProbabilityVector> rows_as_distributions(const Matrix& scores) {
  std::vector<ProbabilityVector> rows;
  rows.reserve(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto row = scores.row(i);
    rows.emplace_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

// Gate items of the target file and re-adjust the ambiguous ones against
// the given reference. Items are rows in single-label mode and
// (example, class) pairs in multilabel mode. Priors: the normalized class
// prior in single-label mode, per-class positive rates in multilabel mode.
ApplyResult adjust_against_reference(const PredictionFile& preds,
                                     const PartitionResult& val_partition,
                                     const PriorVector& priors, const CanHyperParams& hp,
                                     std::size_t threads) {
  hp.validate();
  ApplyResult result;
  result.adjusted = preds;
  result.reference_rows = val_partition.reference.rows();
  const AmbiguityConfig gate{hp.tau, hp.k_max};

  if (preds.mode == TaskMode::kSingleLabel) {
    if (priors.size() != preds.num_classes()) {
      throw InvalidInput("prior length does not match class count");
    }
    const std::vector<ProbabilityVector> rows = rows_as_distributions(preds.scores);
    std::vector<std::size_t> challenging;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (is_ambiguous(rows[i], gate)) challenging.push_back(i);
    }
    result.challenging_count = challenging.size();
    result.gains.resize(challenging.size());
    parallel_for(challenging.size(), threads, [&](std::size_t c) {
      const std::size_t i = challenging[c];
      const ProbabilityVector b1 = readjust(rows[i], val_partition.reference, priors, hp);
      for (std::size_t j = 0; j < preds.num_classes(); ++j) {
        result.adjusted.scores(i, j) = b1[j];
      }
      AdjustRecord& rec = result.gains[c];
      rec.id = preds.ids[i];
      rec.delta = expected_gain(priors, rows[i], b1);
      rec.flipped = argmax_index(rows[i].values()) != argmax_index(b1.values());
    });
    return result;
  }

  // Multilabel: operate on (example, class) pairs with m = 2.
  if (priors.size() != preds.num_classes()) {
    throw InvalidInput("prior length does not match class count");
  }
  const std::size_t m = preds.num_classes();
  const Matrix pairs = to_binary_pairs(preds.scores);
  std::vector<std::size_t> challenging;
  for (std::size_t r = 0; r < pairs.rows(); ++r) {
    ProbabilityVector pair({pairs(r, 0), pairs(r, 1)});
    if (is_ambiguous(pair, gate)) challenging.push_back(r);
  }
  result.challenging_count = challenging.size();
  result.gains.resize(challenging.size());
  Matrix adjusted_pairs = pairs;
  parallel_for(challenging.size(), threads, [&](std::size_t c) {
    const std::size_t r = challenging[c];
    const std::size_t example = r / m, cls = r % m;
    const ProbabilityVector b0({pairs(r, 0), pairs(r, 1)});
    const PriorVector pq = pair_prior(priors[cls]);
    const ProbabilityVector b1 = readjust(b0, val_partition.reference, pq, hp);
    adjusted_pairs(r, 0) = b1[0];
    adjusted_pairs(r, 1) = b1[1];
    AdjustRecord& rec = result.gains[c];
    rec.id = preds.ids[example];
    rec.class_name = preds.class_names[cls];
    rec.delta = expected_gain(pq, b0, b1);
    rec.flipped = argmax_index(b0.values()) != argmax_index(b1.values());
  });
  result.adjusted.scores = from_binary_pairs(adjusted_pairs, preds.size(), m);
  return result;
}

// Gate a prediction file into challenging items and a confident reference.
PartitionResult partition_file(const PredictionFile& preds, double tau,
                               std::size_t k_max) {
  const AmbiguityConfig gate{tau, k_max};
  if (preds.mode == TaskMode::kSingleLabel) {
    return partition_validation(rows_as_distributions(preds.scores), gate);
  }
  const Matrix pairs = to_binary_pairs(preds.scores);
  return partition_validation(rows_as_distributions(pairs), gate);
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Objective objective_from_name(const std::string& name) {
  if (name == "macro_f1") return Objective::kLooseMacroF1;
  if (name == "micro_f1") return Objective::kLooseMicroF1;
  if (name == "top1") return Objective::kTop1Accuracy;
  throw InvalidInput("unknown objective '" + name + "' (expected macro_f1, micro_f1, top1)");
}

std::string objective_name(Objective objective) {
  switch (objective) {
    case Objective::kLooseMacroF1: return "macro_f1";
    case Objective::kLooseMicroF1: return "micro_f1";
    case Objective::kTop1Accuracy: return "top1";
  }
  return "unknown";
}

GridSpec GridSpec::defaults() {
  GridSpec g;
  g.alphas = parse_value_grid("0.1:0.9:0.1,1:35:1");
  g.depths = parse_count_grid("1:5");
  g.taus = parse_value_grid("0.25,0.5,0.75");
  return g;
}

std::vector<double> parse_value_grid(const std::string& spec) {
  std::vector<double> values;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream is(item);
    std::string part;
    while (std::getline(is, part, ':')) parts.push_back(part);
    if (parts.size() == 1) {
      const auto v = parse_double(parts[0]);
      if (!v) throw InvalidInput("malformed grid item '" + item + "'");
      values.push_back(*v);
    } else if (parts.size() == 2 || parts.size() == 3) {
      const auto lo = parse_double(parts[0]);
      const auto hi = parse_double(parts[1]);
      const auto step = parts.size() == 3 ? parse_double(parts[2]) : std::optional<double>(1.0);
      if (!lo || !hi || !step || *step <= 0.0 || *hi < *lo) {
        throw InvalidInput("malformed grid range '" + item + "'");
      }
      const auto count = static_cast<std::size_t>(std::floor((*hi - *lo) / *step + 1e-9));
      for (std::size_t i = 0; i <= count; ++i) values.push_back(*lo + *step * i);
    } else {
      throw InvalidInput("malformed grid item '" + item + "'");
    }
  }
  if (values.empty()) throw InvalidInput("empty grid '" + spec + "'");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<std::size_t> parse_count_grid(const std::string& spec) {
  std::vector<std::size_t> out;
  for (double v : parse_value_grid(spec)) {
    if (v < 1.0 || v != std::floor(v)) {
      throw InvalidInput("grid '" + spec + "' must contain positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<LabelSet> predicted_label_sets(const PredictionFile& preds) {
  std::vector<LabelSet> sets;
  if (preds.mode == TaskMode::kSingleLabel) {
    sets.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      sets.push_back({argmax_index(preds.scores.row(i))});
    }
    return sets;
  }
  return decide_labels(preds.scores);
}

double score_objective(const PredictionFile& preds, const std::vector<LabelSet>& gold,
                       Objective objective) {
  if (gold.size() != preds.size()) {
    throw InvalidInput("gold label count does not match prediction count");
  }
  if (objective == Objective::kTop1Accuracy) {
    if (preds.mode != TaskMode::kSingleLabel) {
      throw InvalidInput("top1 objective requires single-label mode");
    }
    std::vector<std::size_t> gold_index(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i].size() != 1) {
        throw InvalidInput("top1 objective needs exactly one gold label per example");
      }
      gold_index[i] = gold[i][0];
    }
    return top1_accuracy(rows_as_distributions(preds.scores), gold_index);
  }
  const F1Report rep = loose_f1(predicted_label_sets(preds), gold);
  return objective == Objective::kLooseMacroF1 ? rep.macro_f1 : rep.micro_f1;
}

GridSearchResult grid_search(const PredictionFile& val_preds, const LabelFile& val_labels,
                             const PriorVector& priors, const GridSpec& grids,
                             Objective objective, std::size_t k_max,
                             std::size_t threads) {
  if (grids.alphas.empty() || grids.depths.empty() || grids.taus.empty()) {
    throw InvalidInput("hyperparameter grids must be nonempty");
  }
  // Sorted ascending so first-strictly-greater scanning realizes the
  // smaller-alpha, smaller-depth, smaller-tau tie-break.
  GridSpec sorted = grids;
  auto sort_unique = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(sorted.alphas);
  sort_unique(sorted.depths);
  sort_unique(sorted.taus);
  const GridSpec& g = sorted;

  const std::vector<LabelSet> gold =
      resolve_label_sets(val_labels, val_preds.ids, val_preds.class_names);

  // Partitions depend only on tau; compute each once.
  std::vector<std::optional<PartitionResult>> partitions;
  std::vector<std::string> partition_notes(g.taus.size());
  partitions.reserve(g.taus.size());
  for (std::size_t t = 0; t < g.taus.size(); ++t) {
    try {
      partitions.push_back(partition_file(val_preds, g.taus[t], k_max));
    } catch (const InvalidInput& e) {
      partitions.push_back(std::nullopt);
      partition_notes[t] = e.what();
    }
  }

  struct Combo {
    double alpha;
    std::size_t depth;
    std::size_t tau_index;
  };
  std::vector<Combo> combos;
  for (double alpha : g.alphas) {
    for (std::size_t depth : g.depths) {
      for (std::size_t t = 0; t < g.taus.size(); ++t) combos.push_back({alpha, depth, t});
    }
  }

  GridSearchResult result;
  result.table.resize(combos.size());
  parallel_for(combos.size(), threads, [&](std::size_t c) {
    const Combo& combo = combos[c];
    GridSearchRow& row = result.table[c];
    row.alpha = combo.alpha;
    row.depth = combo.depth;
    row.tau = g.taus[combo.tau_index];
    if (!partitions[combo.tau_index]) {
      row.valid = false;
      row.objective = std::numeric_limits<double>::quiet_NaN();
      row.note = partition_notes[combo.tau_index];
      return;
    }
    const CanHyperParams hp{combo.alpha, combo.depth, row.tau, std::max<std::size_t>(k_max, 2)};
    const ApplyResult applied =
        adjust_against_reference(val_preds, *partitions[combo.tau_index], priors, hp, 1);
    row.valid = true;
    row.objective = score_objective(applied.adjusted, gold, objective);
  });

  bool found = false;
  for (const GridSearchRow& row : result.table) {
    if (!row.valid) continue;
    if (!found || row.objective > result.best_objective) {
      found = true;
      result.best_alpha = row.alpha;
      result.best_depth = row.depth;
      result.best_tau = row.tau;
      result.best_objective = row.objective;
    }
  }
  if (!found) {
    throw InvalidInput("no valid grid combination (every tau left an empty reference set)");
  }
  return result;
}

ApplyResult apply_can(const PredictionFile& preds, const PredictionFile& val_preds,
                      const PriorVector& priors, const CanHyperParams& hp,
                      std::size_t threads) {
  hp.validate();
  if (preds.class_names != val_preds.class_names) {
    throw InvalidInput("class headers of the target and reference files do not match");
  }
  if (preds.mode != val_preds.mode) {
    throw InvalidInput("task modes of the target and reference files do not match");
  }
  const PartitionResult val_partition = partition_file(val_preds, hp.tau, hp.k_max);
  return adjust_against_reference(preds, val_partition, priors, hp, threads);
}

}  // namespace can
