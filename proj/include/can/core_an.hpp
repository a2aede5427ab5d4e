#ifndef CAN_CORE_AN_HPP_
#define CAN_CORE_AN_HPP_

#include "can/matrix.hpp"
#include "can/types.hpp"

namespace can {

// Alternating-normalization engine. One iteration rescales the working
// matrix to column stochasticity (after elementwise exponentiation) and
// then back to row stochasticity under the class prior. The re-adjusted
// distribution is the last row of the working matrix after `depth`
// iterations; the reference block is discarded.
//
// Note on naming: some alternating-normalization write-ups label these
// steps by the dimension being summed over, calling the
// column-stochastic step a "row norm" and the row-stochastic step a
// "column norm". The functions here are named by the stochasticity of
// their output.
//
// The augmented working matrix is (n+1) x m: the reference rows first,
// the working copy of the source prediction last.

using AugmentedMatrix = Matrix;

// Stack A0 on top of b0. Throws InvalidInput on a class-count mismatch.
AugmentedMatrix build_augmented(const ProbabilityVector& b0, const ReferenceMatrix& A0);

// S = L^alpha * diag(column sums of L^alpha)^-1. Columns of L^alpha that
// sum to zero stay all-zero (0/0 := 0); 0^alpha := 0 for alpha > 0.
Matrix column_stochastic_step(const Matrix& L, double alpha);

// L = diag(row sums of S*diag(q))^-1 * S * diag(q). A row of S*diag(q)
// summing to zero raises NumericalFailure naming the row index.
AugmentedMatrix row_stochastic_step(const Matrix& S, const PriorVector& q);

// row_stochastic_step(column_stochastic_step(L, alpha), q).
AugmentedMatrix an_iteration(const AugmentedMatrix& L, double alpha, const PriorVector& q);

// Apply hp.depth iterations to [A0; b0] and return the last row.
ProbabilityVector readjust(const ProbabilityVector& b0, const ReferenceMatrix& A0,
                           const PriorVector& q, const CanHyperParams& hp);

// Independent scalar-form route: b_d = lambda2 * Lambda1 * b_{d-1}^alpha,
// with Lambda1 = diag(q_j / s_j) from the column sums s of the
// exponentiated working matrix and lambda2 the normalizer of the working
// row. Recomputes the scaling factors from the full working matrix each
// iteration. Must agree with readjust within 1e-10 elementwise.
ProbabilityVector readjust_scalar_oracle(const ProbabilityVector& b0,
                                         const ReferenceMatrix& A0, const PriorVector& q,
                                         const CanHyperParams& hp);

}  // namespace can

#endif  // CAN_CORE_AN_HPP_
