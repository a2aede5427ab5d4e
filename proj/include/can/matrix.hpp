#ifndef CAN_MATRIX_HPP_
#define CAN_MATRIX_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "can/errors.hpp"

namespace can {

// Dense row-major double matrix. Small and value-semantic; all the
// normalization kernels in this library are plain loops over it.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// Sum of a set of values accumulated in ascending order. The pairing of the
// additions then depends only on the multiset of values, so the result is
// bitwise invariant under any permutation of the inputs.
inline double sum_sorted(std::vector<double>& scratch) {
  std::sort(scratch.begin(), scratch.end());
  double s = 0.0;
  for (double v : scratch) s += v;
  return s;
}

// Column sums via sorted accumulation; exact under row permutation.
inline std::vector<double> column_sums_sorted(const Matrix& m) {
  std::vector<double> sums(m.cols());
  std::vector<double> scratch(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) scratch[i] = m(i, j);
    sums[j] = sum_sorted(scratch);
  }
  return sums;
}

}  // namespace can

#endif  // CAN_MATRIX_HPP_
