#include "can/core_an.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace can {

namespace {

// 0^alpha := 0 for every alpha > 0 (continuity from the right).
inline double pow_entry(double x, double alpha) {
  if (alpha == 1.0) return x;
  if (x == 0.0) return 0.0;
  return std::pow(x, alpha);
}

Matrix elementwise_pow(const Matrix& L, double alpha) {
  if (alpha == 1.0) return L;
  Matrix W(L.rows(), L.cols());
  for (std::size_t i = 0; i < L.rows(); ++i) {
    for (std::size_t j = 0; j < L.cols(); ++j) W(i, j) = pow_entry(L(i, j), alpha);
  }
  return W;
}

}  // namespace

AugmentedMatrix build_augmented(const ProbabilityVector& b0, const ReferenceMatrix& A0) {
  if (b0.size() != A0.cols()) {
    throw InvalidInput("class count mismatch: source prediction has " +
                       std::to_string(b0.size()) + " classes, reference has " +
                       std::to_string(A0.cols()));
  }
  const std::size_t n = A0.rows(), m = A0.cols();
  AugmentedMatrix L(n + 1, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) L(i, j) = A0.matrix()(i, j);
  }
  for (std::size_t j = 0; j < m; ++j) L(n, j) = b0[j];
  return L;
}

Matrix column_stochastic_step(const Matrix& L, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
  Matrix S = elementwise_pow(L, alpha);
  const std::vector<double> col_sums = column_sums_sorted(S);
  for (std::size_t j = 0; j < S.cols(); ++j) {
    const double s = col_sums[j];
    if (s == 0.0) continue;  // zero-mass class carries no evidence
    for (std::size_t i = 0; i < S.rows(); ++i) S(i, j) /= s;
  }
  return S;
}

AugmentedMatrix row_stochastic_step(const Matrix& S, const PriorVector& q) {
  if (q.size() != S.cols()) {
    throw InvalidInput("prior length " + std::to_string(q.size()) +
                       " does not match class count " + std::to_string(S.cols()));
  }
  AugmentedMatrix L(S.rows(), S.cols());
  for (std::size_t i = 0; i < S.rows(); ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < S.cols(); ++j) {
      L(i, j) = S(i, j) * q[j];
      row_sum += L(i, j);
    }
    if (row_sum == 0.0) {
      throw NumericalFailure("degenerate row " + std::to_string(i) +
                             ": all mass annihilated by the prior");
    }
    for (std::size_t j = 0; j < S.cols(); ++j) L(i, j) /= row_sum;
  }
  return L;
}

AugmentedMatrix an_iteration(const AugmentedMatrix& L, double alpha, const PriorVector& q) {
  return row_stochastic_step(column_stochastic_step(L, alpha), q);
}

ProbabilityVector readjust(const ProbabilityVector& b0, const ReferenceMatrix& A0,
                           const PriorVector& q, const CanHyperParams& hp) {
  hp.validate();
  if (q.size() != b0.size()) {
    throw InvalidInput("prior length does not match class count");
  }
  AugmentedMatrix L = build_augmented(b0, A0);
  for (std::size_t d = 0; d < hp.depth; ++d) L = an_iteration(L, hp.alpha, q);
  const std::size_t last = L.rows() - 1;
  std::vector<double> out(L.cols());
  for (std::size_t j = 0; j < L.cols(); ++j) out[j] = L(last, j);
  return ProbabilityVector(std::move(out));
}

ProbabilityVector readjust_scalar_oracle(const ProbabilityVector& b0,
                                         const ReferenceMatrix& A0, const PriorVector& q,
                                         const CanHyperParams& hp) {
  hp.validate();
  if (q.size() != b0.size()) {
    throw InvalidInput("prior length does not match class count");
  }
  const std::size_t n = A0.rows(), m = A0.cols();
  if (b0.size() != m) throw InvalidInput("class count mismatch");

  // Working state: reference block and the source row, kept separately.
  Matrix A(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) A(i, j) = A0.matrix()(i, j);
  }
  std::vector<double> b(b0.values());

  std::vector<double> scratch(n + 1);
  for (std::size_t d = 0; d < hp.depth; ++d) {
    // Exponentiate the full working matrix, then take its column sums.
    Matrix WA(n, m);
    std::vector<double> wb(m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) WA(i, j) = pow_entry(A(i, j), hp.alpha);
    }
    for (std::size_t j = 0; j < m; ++j) wb[j] = pow_entry(b[j], hp.alpha);

    std::vector<double> lambda1(m);  // q_j / s_j, with 0/0 := 0
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) scratch[i] = WA(i, j);
      scratch[n] = wb[j];
      const double s = sum_sorted(scratch);
      lambda1[j] = s == 0.0 ? 0.0 : q[j] / s;
    }

    // b_d = lambda2 * Lambda1 * b_{d-1}^alpha.
    double b_norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      wb[j] *= lambda1[j];
      b_norm += wb[j];
    }
    if (b_norm == 0.0) {
      throw NumericalFailure("degenerate row " + std::to_string(n) +
                             ": all mass annihilated by the prior");
    }
    const double lambda2 = 1.0 / b_norm;
    for (std::size_t j = 0; j < m; ++j) b[j] = wb[j] * lambda2;

    // Same transform for each reference row, with its own normalizer.
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        WA(i, j) *= lambda1[j];
        r += WA(i, j);
      }
      if (r == 0.0) {
        throw NumericalFailure("degenerate row " + std::to_string(i) +
                               ": all mass annihilated by the prior");
      }
      for (std::size_t j = 0; j < m; ++j) A(i, j) = WA(i, j) / r;
    }
  }
  return ProbabilityVector(std::move(b));
}

}  // namespace can
