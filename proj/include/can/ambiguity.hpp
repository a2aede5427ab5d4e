#ifndef CAN_AMBIGUITY_HPP_
#define CAN_AMBIGUITY_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "can/types.hpp"

namespace can {

// Gating configuration: an example is challenging when the maximum
// top-k entropy over k in [2, k_max] exceeds tau (strictly). k_max is
// clamped to the class count; the conventional default is min(10, m).
struct AmbiguityConfig {
  double tau = 0.5;
  std::size_t k_max = 10;

  void validate() const;
  std::size_t effective_k_max(std::size_t m) const;
};

struct PartitionResult {
  std::vector<std::size_t> challenging_indices;
  std::vector<std::size_t> confident_indices;
  ReferenceMatrix reference;  // confident rows, original order
};

// -sum v_i log_m v_i with 0 log 0 := 0. v need not sum to 1 (it is also
// applied to unrenormalized top-k slices); m >= 2 sets the log base.
double entropy_base_m(std::span<const double> v, std::size_t m);

// The k largest entries of v in descending order; ties broken by lower
// index first.
std::vector<double> top_k(std::span<const double> v, std::size_t k);

// Entropy (base m = full class count) of the top-k slice, without
// renormalizing the slice.
double top_k_entropy(const ProbabilityVector& v, std::size_t k);

// max over k in [2, effective k_max] of top_k_entropy. One sort, O(m).
double ambiguity_score(const ProbabilityVector& v, const AmbiguityConfig& cfg);

bool is_ambiguous(const ProbabilityVector& v, const AmbiguityConfig& cfg);

// Split predictions into challenging examples and the confident reference
// set. Throws InvalidInput when every example is ambiguous.
PartitionResult partition_validation(const std::vector<ProbabilityVector>& predictions,
                                     const AmbiguityConfig& cfg);

}  // namespace can

#endif  // CAN_AMBIGUITY_HPP_
