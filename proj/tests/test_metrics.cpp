#include <cmath>
#include <vector>

#include <doctest.h>

#include "can/metrics.hpp"
#include "can/rng.hpp"

using namespace can;

namespace {

ProbabilityVector pv(std::vector<double> v) { return ProbabilityVector(std::move(v)); }

}  // namespace

TEST_CASE("expected accuracy closed forms") {
  CHECK(expected_accuracy(PriorVector({0.5, 0.5}), pv({0.5, 0.5})) == doctest::Approx(0.25));
  CHECK(expected_accuracy(PriorVector({1.0, 0.0}), pv({1.0, 0.0})) == doctest::Approx(0.5));
  CHECK(expected_accuracy(PriorVector({0.9, 0.1}), pv({0.4, 0.6})) ==
        doctest::Approx(0.21).epsilon(1e-12));
  CHECK_THROWS_AS(expected_accuracy(PriorVector({0.9, 0.9}), pv({0.5, 0.5})), InvalidInput);
  CHECK_THROWS_AS(expected_accuracy(PriorVector({0.5, 0.5}), pv({1.0})), InvalidInput);
}

TEST_CASE("expected gain") {
  CHECK(expected_gain(PriorVector({0.7, 0.3}), pv({0.2, 0.8}), pv({0.2, 0.8})) == 0.0);
  CHECK(expected_gain(PriorVector({0.9, 0.1}), pv({0.4, 0.6}), pv({0.75, 0.25})) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  // uniform prior makes q^T b constant, so the gain is identically 0
  SplitMix64 rng{3};
  for (int trial = 0; trial < 50; ++trial) {
    const ProbabilityVector b0 = pv(sample_dirichlet(4, rng));
    const ProbabilityVector b1 = pv(sample_dirichlet(4, rng));
    CHECK(std::abs(expected_gain(PriorVector(std::vector<double>(4, 0.25)), b0, b1)) <=
          1e-9);
  }
  CHECK_THROWS_AS(expected_gain(PriorVector({0.0, 1.0}), pv({1.0, 0.0}), pv({0.5, 0.5})),
                  NumericalFailure);
}

TEST_CASE("accuracy gain requires both a positive gain and an argmax flip") {
  const PriorVector q({0.9, 0.1});
  const std::vector<ProbabilityVector> b0 = {pv({0.4, 0.6})};

  CHECK(accuracy_gain(q, b0, b0) == 0.0);
  CHECK(accuracy_gain(q, b0, {pv({0.75, 0.25})}) == 1.0);  // flip and positive gain
  // positive gain but same argmax
  CHECK(accuracy_gain(q, {pv({0.45, 0.55})}, {pv({0.49, 0.51})}) == 0.0);
}

TEST_CASE("accuracy gain stays in [0,1]") {
  SplitMix64 rng{21};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng.next() % 6;
    const std::size_t n = 1 + rng.next() % 10;
    const PriorVector q(sample_dirichlet(m, rng));
    std::vector<ProbabilityVector> b0, b1;
    for (std::size_t i = 0; i < n; ++i) {
      b0.push_back(pv(sample_dirichlet(m, rng)));
      b1.push_back(pv(sample_dirichlet(m, rng)));
    }
    const double gain = accuracy_gain(q, b0, b1);
    CHECK(gain >= 0.0);
    CHECK(gain <= 1.0);
    CHECK(accuracy_gain(q, b0, b0) == 0.0);
  }
}

TEST_CASE("loose F1 hand-counted fixtures") {
  {
    const std::vector<LabelSet> sets = {{0, 2}, {1}};
    const F1Report rep = loose_f1(sets, sets);
    CHECK(rep.macro_p == 1.0);
    CHECK(rep.macro_r == 1.0);
    CHECK(rep.macro_f1 == 1.0);
    CHECK(rep.micro_p == 1.0);
    CHECK(rep.micro_r == 1.0);
    CHECK(rep.micro_f1 == 1.0);
  }
  {
    const F1Report rep = loose_f1({{0}}, {{0, 1}});
    CHECK(rep.macro_p == 1.0);
    CHECK(rep.macro_r == 0.5);
    CHECK(rep.macro_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // single example: micro equals macro
    CHECK(rep.micro_p == rep.macro_p);
    CHECK(rep.micro_r == rep.macro_r);
    CHECK(rep.micro_f1 == doctest::Approx(rep.macro_f1).epsilon(1e-12));
  }
  {
    const F1Report rep = loose_f1({{1}}, {{0}});
    CHECK(rep.macro_p == 0.0);
    CHECK(rep.macro_r == 0.0);
    CHECK(rep.macro_f1 == 0.0);
    CHECK(rep.micro_f1 == 0.0);
  }
}

TEST_CASE("loose F1 empty-set conventions") {
  // empty prediction: precision 1 by convention
  {
    const F1Report rep = loose_f1({{}}, {{0}});
    CHECK(rep.macro_p == 1.0);
    CHECK(rep.macro_r == 0.0);
    CHECK(rep.macro_f1 == 0.0);
  }
  // empty gold: recall 1 by convention
  {
    const F1Report rep = loose_f1({{0}}, {{}});
    CHECK(rep.macro_p == 0.0);
    CHECK(rep.macro_r == 1.0);
    CHECK(rep.macro_f1 == 0.0);
  }
  // both empty: perfect agreement
  {
    const F1Report rep = loose_f1({{}}, {{}});
    CHECK(rep.macro_p == 1.0);
    CHECK(rep.macro_r == 1.0);
    CHECK(rep.macro_f1 == 1.0);
    CHECK(rep.micro_p == 1.0);
    CHECK(rep.micro_r == 1.0);
    CHECK(rep.micro_f1 == 1.0);
  }
  // two-example mix: pred {0} vs gold {0,1}, pred {} vs gold {1}
  {
    const F1Report rep = loose_f1({{0}, {}}, {{0, 1}, {1}});
    CHECK(rep.macro_p == 1.0);                                   // (1 + 1) / 2
    CHECK(rep.macro_r == doctest::Approx(0.25).epsilon(1e-12));  // (0.5 + 0) / 2
    CHECK(rep.macro_f1 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(rep.micro_p == 1.0);                                   // 1 / 1
    CHECK(rep.micro_r == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rep.micro_f1 == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("micro equals macro for symmetric per-example counts") {
  const std::vector<LabelSet> pred = {{0}, {1}, {2}};
  const std::vector<LabelSet> gold = {{0}, {1}, {0}};
  const F1Report rep = loose_f1(pred, gold);
  CHECK(rep.micro_f1 == doctest::Approx(rep.macro_f1).epsilon(1e-12));
}

TEST_CASE("top-1 accuracy with index tie-break") {
  const std::vector<ProbabilityVector> preds = {pv({0.9, 0.1}), pv({0.2, 0.8})};
  CHECK(top1_accuracy(preds, {0, 1}) == 1.0);
  CHECK(top1_accuracy(preds, {1, 0}) == 0.0);
  CHECK(top1_accuracy({pv({0.5, 0.5})}, {0}) == 1.0);  // tie goes to the lower index
  CHECK_THROWS_AS(top1_accuracy(preds, {0, 2}), InvalidInput);
}
