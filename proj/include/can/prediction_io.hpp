#ifndef CAN_PREDICTION_IO_HPP_
#define CAN_PREDICTION_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "can/matrix.hpp"
#include "can/types.hpp"

namespace can {

enum class TaskMode { kSingleLabel, kMultiLabel };

// Prediction CSV: header `id,<class_1>,...,<class_m>`, UTF-8, '.' decimal.
// Single-label rows must sum to 1 within 1e-6 and are renormalized on
// load; multilabel entries must lie in [0, 1]. Scores are written with 17
// significant digits so a load/write round trip is exact.
struct PredictionFile {
  TaskMode mode = TaskMode::kSingleLabel;
  std::vector<std::string> class_names;
  std::vector<std::string> ids;
  Matrix scores;  // n x m

  std::size_t size() const { return ids.size(); }
  std::size_t num_classes() const { return class_names.size(); }
};

// Label file: `id,label` (single) or `id,label;label;...` (multi; the
// label list may be empty). Labels are class names from the prediction
// header.
struct LabelFile {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> labels;
};

PredictionFile load_predictions(const std::filesystem::path& path, TaskMode mode);
PredictionFile parse_predictions(std::istream& in, TaskMode mode,
                                 const std::string& source_name);

void write_predictions(const std::filesystem::path& path, const PredictionFile& file);
void write_predictions(std::ostream& os, const PredictionFile& file);

LabelFile load_labels(const std::filesystem::path& path, TaskMode mode);
LabelFile parse_labels(std::istream& in, TaskMode mode, const std::string& source_name);

// Gold label sets for `ids`, resolved against `class_names`. Every id must
// be present in the label file; unseen class names are an error.
std::vector<std::vector<std::size_t>> resolve_label_sets(
    const LabelFile& labels, const std::vector<std::string>& ids,
    const std::vector<std::string>& class_names);

// Training-label priors. Single-label: normalized class frequencies with
// additive smoothing. Multilabel: per-class positive rates
// (count + eps) / (records + 2 eps). Classes with zero training mass are
// reported through `zero_classes` when provided.
PriorVector compute_priors(const std::filesystem::path& labels_path,
                           const std::vector<std::string>& class_names, TaskMode mode,
                           double smoothing = 0.0,
                           std::vector<std::string>* zero_classes = nullptr);
PriorVector compute_priors(const LabelFile& labels,
                           const std::vector<std::string>& class_names, TaskMode mode,
                           double smoothing = 0.0,
                           std::vector<std::string>* zero_classes = nullptr);

}  // namespace can

#endif  // CAN_PREDICTION_IO_HPP_
