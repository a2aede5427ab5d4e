#include "can/prediction_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "can/errors.hpp"
#include "can/multilabel.hpp"

namespace can {

namespace {

constexpr double kRowSumTol = 1e-6;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

double parse_score(const std::string& text, const std::string& where) {
  if (text.empty()) throw InvalidInput(where + ": empty score field");
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(value)) {
    throw InvalidInput(where + ": malformed score '" + text + "'");
  }
  return value;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string format_score(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return in;
}

}  // namespace

PredictionFile parse_predictions(std::istream& in, TaskMode mode,
                                 const std::string& source_name) {
  PredictionFile file;
  file.mode = mode;

  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(source_name + ": empty file");
  const std::vector<std::string> header = split(strip_cr(line), ',');
  if (header.size() < 3 || header[0] != "id") {
    throw InvalidInput(source_name + ": header must be id,<class_1>,...,<class_m> with m >= 2");
  }
  file.class_names.assign(header.begin() + 1, header.end());
  const std::size_t m = file.class_names.size();
  {
    std::vector<std::string> names(file.class_names);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
      throw InvalidInput(source_name + ": duplicate class name in header");
    }
  }

  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (fields.size() != m + 1) {
      throw InvalidInput(where + ": expected " + std::to_string(m + 1) + " fields, got " +
                         std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    if (id.empty()) throw InvalidInput(where + ": empty id");
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) row[j] = parse_score(fields[j + 1], where);

    if (mode == TaskMode::kSingleLabel) {
      double sum = 0.0;
      for (double v : row) {
        if (v < 0.0) {
          throw InvalidInput(where + ": record '" + id + "' has a negative score");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTol) {
        throw InvalidInput(where + ": record '" + id + "' scores sum to " +
                           format_score(sum) + ", expected 1 within 1e-6");
      }
      for (double& v : row) v /= sum;
    } else {
      for (double v : row) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw InvalidInput(where + ": record '" + id + "' has a score outside [0, 1]");
        }
      }
    }
    file.ids.push_back(id);
    values.insert(values.end(), row.begin(), row.end());
  }
  if (file.ids.empty()) throw InvalidInput(source_name + ": no prediction records");

  file.scores = Matrix(file.ids.size(), m);
  file.scores.data() = std::move(values);
  return file;
}

PredictionFile load_predictions(const std::filesystem::path& path, TaskMode mode) {
  std::ifstream in = open_or_throw(path);
  return parse_predictions(in, mode, path.string());
}

void write_predictions(std::ostream& os, const PredictionFile& file) {
  os << "id";
  for (const std::string& name : file.class_names) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < file.size(); ++i) {
    os << file.ids[i];
    for (std::size_t j = 0; j < file.num_classes(); ++j) {
      os << ',' << format_score(file.scores(i, j));
    }
    os << '\n';
  }
}

void write_predictions(const std::filesystem::path& path, const PredictionFile& file) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  write_predictions(out, file);
}

LabelFile parse_labels(std::istream& in, TaskMode mode, const std::string& source_name) {
  LabelFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput(where + ": expected id,label");
    std::string id = line.substr(0, comma);
    if (id.empty()) throw InvalidInput(where + ": empty id");
    if (id == "id" && line_no == 1) continue;  // optional header row
    const std::string rest = line.substr(comma + 1);
    std::vector<std::string> labels;
    if (mode == TaskMode::kSingleLabel) {
      if (rest.empty()) throw InvalidInput(where + ": missing label");
      labels.push_back(rest);
    } else {
      for (const std::string& label : split(rest, ';')) {
        if (!label.empty()) labels.push_back(label);
      }
    }
    file.ids.push_back(std::move(id));
    file.labels.push_back(std::move(labels));
  }
  if (file.ids.empty()) throw InvalidInput(source_name + ": no label records");
  return file;
}

LabelFile load_labels(const std::filesystem::path& path, TaskMode mode) {
  std::ifstream in = open_or_throw(path);
  return parse_labels(in, mode, path.string());
}

std::vector<std::vector<std::size_t>> resolve_label_sets(
    const LabelFile& labels, const std::vector<std::string>& ids,
    const std::vector<std::string>& class_names) {
  std::unordered_map<std::string, std::size_t> class_index;
  for (std::size_t j = 0; j < class_names.size(); ++j) class_index[class_names[j]] = j;
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < labels.ids.size(); ++i) row_of[labels.ids[i]] = i;

  std::vector<std::vector<std::size_t>> sets;
  sets.reserve(ids.size());
  for (const std::string& id : ids) {
    const auto row = row_of.find(id);
    if (row == row_of.end()) throw InvalidInput("no gold label for id '" + id + "'");
    std::vector<std::size_t> set;
    for (const std::string& name : labels.labels[row->second]) {
      const auto cls = class_index.find(name);
      if (cls == class_index.end()) {
        throw InvalidInput("label file names unknown class '" + name + "'");
      }
      set.push_back(cls->second);
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    sets.push_back(std::move(set));
  }
  return sets;
}

PriorVector compute_priors(const LabelFile& labels,
                           const std::vector<std::string>& class_names, TaskMode mode,
                           double smoothing, std::vector<std::string>* zero_classes) {
  if (smoothing < 0.0) throw InvalidInput("prior smoothing must be nonnegative");
  std::unordered_map<std::string, std::size_t> class_index;
  for (std::size_t j = 0; j < class_names.size(); ++j) class_index[class_names[j]] = j;

  const std::size_t m = class_names.size();
  std::vector<double> counts(m, 0.0);
  for (std::size_t i = 0; i < labels.ids.size(); ++i) {
    for (const std::string& name : labels.labels[i]) {
      const auto cls = class_index.find(name);
      if (cls == class_index.end()) {
        throw InvalidInput("training labels name unknown class '" + name + "'");
      }
      counts[cls->second] += 1.0;
    }
  }

  if (zero_classes) {
    for (std::size_t j = 0; j < m; ++j) {
      if (counts[j] + smoothing == 0.0) zero_classes->push_back(class_names[j]);
    }
  }

  std::vector<double> q(m);
  if (mode == TaskMode::kSingleLabel) {
    double total = 0.0;
    for (double c : counts) total += c + smoothing;
    if (total == 0.0) throw InvalidInput("no training labels to estimate priors from");
    for (std::size_t j = 0; j < m; ++j) q[j] = (counts[j] + smoothing) / total;
  } else {
    const double records = static_cast<double>(labels.ids.size());
    for (std::size_t j = 0; j < m; ++j) {
      q[j] = (counts[j] + smoothing) / (records + 2.0 * smoothing);
    }
  }
  return PriorVector(std::move(q));
}

PriorVector compute_priors(const std::filesystem::path& labels_path,
                           const std::vector<std::string>& class_names, TaskMode mode,
                           double smoothing, std::vector<std::string>* zero_classes) {
  const LabelFile labels = load_labels(labels_path, mode);
  return compute_priors(labels, class_names, mode, smoothing, zero_classes);
}

}  // namespace can
