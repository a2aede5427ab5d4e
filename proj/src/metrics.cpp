#include "can/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "can/errors.hpp"

namespace can {

namespace {

void check_normalized(const PriorVector& q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += q[i];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidInput("prior must be normalized for expected accuracy (sum = " +
                       std::to_string(sum) + ")");
  }
}

std::size_t intersection_size(const LabelSet& a, const LabelSet& b) {
  std::size_t count = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

double harmonic_f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::size_t argmax_index(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double expected_accuracy(const PriorVector& q, const ProbabilityVector& b) {
  if (q.size() != b.size()) throw InvalidInput("prior/prediction length mismatch");
  check_normalized(q);
  double dot = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) dot += q[i] * b[i];
  return dot / static_cast<double>(q.size());
}

double expected_gain(const PriorVector& q, const ProbabilityVector& b0,
                     const ProbabilityVector& b1) {
  if (b0.size() != b1.size()) throw InvalidInput("prediction length mismatch");
  const double e0 = expected_accuracy(q, b0);
  const double e1 = expected_accuracy(q, b1);
  if (e0 == 0.0) {
    throw NumericalFailure("expected gain undefined: expected accuracy of the source is 0");
  }
  return (e1 - e0) / e0;
}

double accuracy_gain(const PriorVector& q, const std::vector<ProbabilityVector>& B0,
                     const std::vector<ProbabilityVector>& B1) {
  if (B0.size() != B1.size() || B0.empty()) {
    throw InvalidInput("prediction sets must be nonempty and the same size");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < B0.size(); ++i) {
    const double delta = expected_gain(q, B0[i], B1[i]);
    const bool flipped = argmax_index(B0[i].values()) != argmax_index(B1[i].values());
    if (delta > 0.0 && flipped) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(B0.size());
}

F1Report loose_f1(const std::vector<LabelSet>& predicted,
                  const std::vector<LabelSet>& gold) {
  if (predicted.size() != gold.size() || predicted.empty()) {
    throw InvalidInput("predicted and gold label sets must be nonempty and the same size");
  }
  const double n = static_cast<double>(predicted.size());
  double sum_p = 0.0, sum_r = 0.0;
  std::size_t pooled_inter = 0, pooled_pred = 0, pooled_gold = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const std::size_t inter = intersection_size(predicted[i], gold[i]);
    sum_p += predicted[i].empty() ? 1.0
                                  : static_cast<double>(inter) / predicted[i].size();
    sum_r += gold[i].empty() ? 1.0 : static_cast<double>(inter) / gold[i].size();
    pooled_inter += inter;
    pooled_pred += predicted[i].size();
    pooled_gold += gold[i].size();
  }
  F1Report rep;
  rep.macro_p = sum_p / n;
  rep.macro_r = sum_r / n;
  rep.macro_f1 = harmonic_f1(rep.macro_p, rep.macro_r);
  rep.micro_p = pooled_pred == 0 ? 1.0 : static_cast<double>(pooled_inter) / pooled_pred;
  rep.micro_r = pooled_gold == 0 ? 1.0 : static_cast<double>(pooled_inter) / pooled_gold;
  rep.micro_f1 = harmonic_f1(rep.micro_p, rep.micro_r);
  return rep;
}

double top1_accuracy(const std::vector<ProbabilityVector>& predictions,
                     const std::vector<std::size_t>& gold) {
  if (predictions.size() != gold.size() || predictions.empty()) {
    throw InvalidInput("predictions and gold labels must be nonempty and the same size");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (gold[i] >= predictions[i].size()) {
      throw InvalidInput("gold class index " + std::to_string(gold[i]) +
                         " out of range for example " + std::to_string(i));
    }
    if (argmax_index(predictions[i].values()) == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

}  // namespace can
