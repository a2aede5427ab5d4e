#ifndef CAN_TYPES_HPP_
#define CAN_TYPES_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "can/errors.hpp"
#include "can/matrix.hpp"

namespace can {

// Absolute tolerance on "sums to 1" for probability vectors.
inline constexpr double kProbabilitySumTol = 1e-9;

// A length-m class probability distribution: nonnegative entries summing
// to 1 within kProbabilitySumTol. Validated at construction.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const ProbabilityVector& other) const = default;

 private:
  std::vector<double> values_;
};

// n >= 1 probability distributions over the same m classes, stored as an
// n x m row-stochastic matrix.
class ReferenceMatrix {
 public:
  explicit ReferenceMatrix(Matrix rows);
  explicit ReferenceMatrix(const std::vector<std::vector<double>>& rows);
  explicit ReferenceMatrix(const std::vector<ProbabilityVector>& rows);

  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

// Nonnegative class-prior weights (diagonal of the prior scaling matrix).
// At least one entry must be positive; zero entries are legal but
// annihilate their class, which callers may want to surface.
class PriorVector {
 public:
  explicit PriorVector(std::vector<double> weights);

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }
  const std::vector<double>& values() const { return q_; }
  bool has_zero_entry() const { return has_zero_; }

 private:
  std::vector<double> q_;
  bool has_zero_;
};

// Hyperparameters of the re-adjustment: exponent, recursion depth,
// ambiguity threshold, and the top-k scan bound.
struct CanHyperParams {
  double alpha = 1.0;
  std::size_t depth = 1;
  double tau = 0.5;
  std::size_t k_max = 10;

  // Throws InvalidInput when out of range.
  void validate() const;
};

}  // namespace can

#endif  // CAN_TYPES_HPP_
