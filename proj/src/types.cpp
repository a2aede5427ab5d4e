#include "can/types.hpp"

#include <cmath>
#include <string>

namespace can {

namespace {

void check_probability_entries(std::span<const double> v, const char* what) {
  if (v.empty()) throw InvalidInput(std::string(what) + " must not be empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) {
      throw InvalidInput(std::string(what) + ": entry " + std::to_string(i) +
                         " is negative or NaN");
    }
    sum += v[i];
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTol) {
    throw InvalidInput(std::string(what) + ": entries sum to " + std::to_string(sum) +
                       ", expected 1");
  }
}

}  // namespace

ProbabilityVector::ProbabilityVector(std::vector<double> values)
    : values_(std::move(values)) {
  check_probability_entries(values_, "probability vector");
}

ReferenceMatrix::ReferenceMatrix(Matrix rows) : m_(std::move(rows)) {
  if (m_.rows() == 0) throw InvalidInput("reference matrix must have at least one row");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    check_probability_entries(m_.row(i), "reference matrix row");
  }
}

ReferenceMatrix::ReferenceMatrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidInput("reference matrix must have at least one row");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw InvalidInput("reference matrix rows have inconsistent lengths");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  *this = ReferenceMatrix(std::move(m));
}

ReferenceMatrix::ReferenceMatrix(const std::vector<ProbabilityVector>& rows) {
  if (rows.empty()) throw InvalidInput("reference matrix must have at least one row");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw InvalidInput("reference matrix rows have inconsistent lengths");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  m_ = std::move(m);
}

PriorVector::PriorVector(std::vector<double> weights)
    : q_(std::move(weights)), has_zero_(false) {
  if (q_.empty()) throw InvalidInput("prior vector must not be empty");
  bool any_positive = false;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (!(q_[i] >= 0.0)) {
      throw InvalidInput("prior vector: entry " + std::to_string(i) +
                         " is negative or NaN");
    }
    if (q_[i] > 0.0) any_positive = true;
    if (q_[i] == 0.0) has_zero_ = true;
  }
  if (!any_positive) throw InvalidInput("prior vector must have a positive entry");
}

void CanHyperParams::validate() const {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  if (depth < 1) throw InvalidInput("depth must be at least 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("tau must lie in [0, 1]");
  if (k_max < 2) throw InvalidInput("k_max must be at least 2");
}

}  // namespace can
