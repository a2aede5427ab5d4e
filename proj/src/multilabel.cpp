#include "can/multilabel.hpp"

#include <string>

#include "can/errors.hpp"

namespace can {

void validate_multilabel_scores(const Matrix& scores) {
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    for (std::size_t j = 0; j < scores.cols(); ++j) {
      const double p = scores(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidInput("multilabel score at (" + std::to_string(i) + ", " +
                           std::to_string(j) + ") is outside [0, 1]");
      }
    }
  }
}

Matrix to_binary_pairs(const Matrix& scores) {
  validate_multilabel_scores(scores);
  Matrix pairs(scores.rows() * scores.cols(), 2);
  std::size_t r = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    for (std::size_t j = 0; j < scores.cols(); ++j, ++r) {
      const double p = scores(i, j);
      pairs(r, 0) = p;
      pairs(r, 1) = 1.0 - p;
    }
  }
  return pairs;
}

Matrix from_binary_pairs(const Matrix& pairs, std::size_t n, std::size_t m) {
  if (pairs.cols() != 2) throw InvalidInput("pair block must have 2 columns");
  if (pairs.rows() != n * m) {
    throw InvalidInput("pair block has " + std::to_string(pairs.rows()) +
                       " rows, expected " + std::to_string(n * m));
  }
  Matrix scores(n, m);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j, ++r) scores(i, j) = pairs(r, 0);
  }
  return scores;
}

std::vector<std::vector<std::size_t>> decide_labels(const Matrix& scores) {
  validate_multilabel_scores(scores);
  std::vector<std::vector<std::size_t>> sets(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    for (std::size_t j = 0; j < scores.cols(); ++j) {
      if (scores(i, j) >= 0.5) sets[i].push_back(j);
    }
    if (sets[i].empty() && scores.cols() > 0) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < scores.cols(); ++j) {
        if (scores(i, j) > scores(i, best)) best = j;
      }
      sets[i].push_back(best);
    }
  }
  return sets;
}

PriorVector pair_prior(double positive_rate) {
  if (!(positive_rate >= 0.0 && positive_rate <= 1.0)) {
    throw InvalidInput("positive rate must lie in [0, 1]");
  }
  return PriorVector({positive_rate, 1.0 - positive_rate});
}

}  // namespace can
