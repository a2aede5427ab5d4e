#ifndef CAN_MULTILABEL_HPP_
#define CAN_MULTILABEL_HPP_

#include <cstddef>
#include <vector>

#include "can/matrix.hpp"
#include "can/types.hpp"

namespace can {

// Multi-label reduction: an n x m matrix of independent per-class
// probabilities becomes nm binary distributions, one per (example, class)
// pair, so the single-label machinery applies with m = 2.

// Validates every entry lies in [0, 1]; rows need not sum to 1.
void validate_multilabel_scores(const Matrix& scores);

// Row (i*m + j) of the result is [p_ij, 1 - p_ij].
Matrix to_binary_pairs(const Matrix& scores);

// Inverse of to_binary_pairs; exact round trip. The pair block must have
// n*m rows.
Matrix from_binary_pairs(const Matrix& pairs, std::size_t n, std::size_t m);

// Class j is in example i's set iff p_ij >= 0.5. An empty set falls back
// to the single argmax class (lowest index on ties).
std::vector<std::vector<std::size_t>> decide_labels(const Matrix& scores);

// Pair-level prior for class j: [q_j, 1 - q_j] from the class's positive
// frequency.
PriorVector pair_prior(double positive_rate);

}  // namespace can

#endif  // CAN_MULTILABEL_HPP_
