#include "can/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace can {

void AmbiguityConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidInput("tau must lie in [0, 1]");
  if (k_max < 2) throw InvalidInput("k_max must be at least 2");
}

std::size_t AmbiguityConfig::effective_k_max(std::size_t m) const {
  if (m < 2) throw InvalidInput("ambiguity gating needs at least 2 classes");
  return std::min(k_max, m);
}

double entropy_base_m(std::span<const double> v, std::size_t m) {
  if (m < 2) throw InvalidInput("entropy base must be at least 2 classes");
  const double log_m = std::log(static_cast<double>(m));
  double h = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = v[i];
    if (!(x >= 0.0)) {
      throw InvalidInput("entropy input: entry " + std::to_string(i) +
                         " is negative or NaN");
    }
    if (x > 0.0) h -= x * std::log(x) / log_m;
  }
  return h;
}

std::vector<double> top_k(std::span<const double> v, std::size_t k) {
  if (k < 1 || k > v.size()) {
    throw InvalidInput("top-k: k = " + std::to_string(k) + " out of range for length " +
                       std::to_string(v.size()));
  }
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // stable sort keeps the lower index first among equal values
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = v[order[i]];
  return out;
}

double top_k_entropy(const ProbabilityVector& v, std::size_t k) {
  const std::size_t m = v.size();
  if (k < 2 || k > m) {
    throw InvalidInput("top-k entropy: k must lie in [2, m]");
  }
  const std::vector<double> slice = top_k(v.values(), k);
  return entropy_base_m(slice, m);
}

double ambiguity_score(const ProbabilityVector& v, const AmbiguityConfig& cfg) {
  cfg.validate();
  const std::size_t m = v.size();
  const std::size_t k_eff = cfg.effective_k_max(m);
  std::vector<double> sorted(v.values());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double log_m = std::log(static_cast<double>(m));
  auto term = [&](double x) { return x > 0.0 ? -x * std::log(x) / log_m : 0.0; };
  double h = term(sorted[0]) + term(sorted[1]);
  double best = h;
  for (std::size_t k = 3; k <= k_eff; ++k) {
    h += term(sorted[k - 1]);
    best = std::max(best, h);
  }
  return best;
}

bool is_ambiguous(const ProbabilityVector& v, const AmbiguityConfig& cfg) {
  return ambiguity_score(v, cfg) > cfg.tau;
}

PartitionResult partition_validation(const std::vector<ProbabilityVector>& predictions,
                                     const AmbiguityConfig& cfg) {
  if (predictions.empty()) throw InvalidInput("no predictions to partition");
  const std::size_t m = predictions[0].size();
  std::vector<std::size_t> challenging, confident;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != m) {
      throw InvalidInput("prediction " + std::to_string(i) +
                         " has inconsistent class count");
    }
    if (is_ambiguous(predictions[i], cfg)) {
      challenging.push_back(i);
    } else {
      confident.push_back(i);
    }
  }
  if (confident.empty()) {
    throw InvalidInput("empty reference set: every example is ambiguous at tau = " +
                       std::to_string(cfg.tau) + "; consider relaxing tau");
  }
  Matrix ref(confident.size(), m);
  for (std::size_t r = 0; r < confident.size(); ++r) {
    const auto& p = predictions[confident[r]];
    for (std::size_t j = 0; j < m; ++j) ref(r, j) = p[j];
  }
  return PartitionResult{std::move(challenging), std::move(confident),
                         ReferenceMatrix(std::move(ref))};
}

}  // namespace can
