#ifndef CAN_METRICS_HPP_
#define CAN_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "can/types.hpp"

namespace can {

using LabelSet = std::vector<std::size_t>;  // sorted, unique

struct F1Report {
  double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
  double micro_p = 0.0, micro_r = 0.0, micro_f1 = 0.0;
};

// Index of the largest entry, lowest index on ties. Shared tie-break for
// accuracy-style metrics.
std::size_t argmax_index(std::span<const double> v);

// (1/m) * q^T b for a normalized prior q; lies in [0, 1/m].
double expected_accuracy(const PriorVector& q, const ProbabilityVector& b);

// Relative expected performance gain (E1 - E0) / E0. Throws
// NumericalFailure when E0 = 0.
double expected_gain(const PriorVector& q, const ProbabilityVector& b0,
                     const ProbabilityVector& b1);

// Fraction of examples whose gain is positive AND whose argmax changed.
double accuracy_gain(const PriorVector& q, const std::vector<ProbabilityVector>& B0,
                     const std::vector<ProbabilityVector>& B1);

// Loose macro/micro F1 over predicted and gold label sets. Conventions:
// empty predicted set -> precision 1; empty gold set -> recall 1;
// F1 = 0 when P + R = 0. Macro averages per-example P and R before the
// harmonic mean; micro pools the counts.
F1Report loose_f1(const std::vector<LabelSet>& predicted, const std::vector<LabelSet>& gold);

// Fraction of examples whose argmax equals the gold class index.
double top1_accuracy(const std::vector<ProbabilityVector>& predictions,
                     const std::vector<std::size_t>& gold);

}  // namespace can

#endif  // CAN_METRICS_HPP_
