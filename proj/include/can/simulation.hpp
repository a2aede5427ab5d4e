#ifndef CAN_SIMULATION_HPP_
#define CAN_SIMULATION_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "can/rng.hpp"
#include "can/types.hpp"

namespace can {

// Monte Carlo study of the re-adjustment on random matrices: reference
// rows and source predictions are sampled inside prescribed ambiguity
// bins, the prior is a flat Dirichlet draw, and the mean expected gain
// and accuracy gain are aggregated per (m, bin pair, alpha) cell.

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool closed_hi = false;

  bool contains(double x) const { return x >= lo && (closed_hi ? x <= hi : x < hi); }
  std::string label() const;
};

// The four standard ambiguity bins [0,.25) [.25,.5) [.5,.75) [.75,1].
std::array<Interval, 4> default_intervals();

struct SimulationConfig {
  std::vector<std::size_t> m_values;   // default {2..10, 20, 30, ..., 100}
  std::array<Interval, 4> intervals = default_intervals();
  std::size_t trials = 200;
  std::size_t n = 100;                 // rows of B0 per trial
  std::vector<double> alphas;          // default {0.1..0.9, 1..9}
  std::size_t depth = 1;
  std::size_t k_max = 10;              // clamped to m per cell
  std::uint64_t seed = 0;

  static SimulationConfig defaults();
  void validate() const;
};

struct CellStats {
  std::size_t m = 0;
  std::size_t interval_a = 0, interval_b = 0;  // bin indices
  double alpha = 0.0;
  std::size_t trials_done = 0;  // trials that produced data
  std::size_t failures = 0;     // trials lost to sampling exhaustion
  double delta_sum = 0.0;       // sum of per-row expected gains
  std::size_t delta_count = 0;
  double acc_gain_sum = 0.0;    // sum of per-trial accuracy gains

  double mean_delta() const;
  double mean_accuracy_gain() const;
};

struct SummaryCell {
  double mean_delta = 0.0;
  double mean_accuracy_gain = 0.0;
  std::size_t delta_count = 0;
  std::size_t trials = 0;
  std::size_t failures = 0;
};

struct SimulationReport {
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  std::array<Interval, 4> intervals = default_intervals();
  std::vector<CellStats> cells;  // grid order: m, interval_a, interval_b, alpha

  // Aggregate over m and alpha into the 4x4 (interval_a, interval_b) grid.
  std::array<std::array<SummaryCell, 4>, 4> summary() const;
};

// Draw a probability vector whose ambiguity score lies in `interval`.
// Rejection sampling from the flat Dirichlet, falling back to a
// temperature bisection (renormalized powers of a draw) when the bin is
// rarely hit. Each scored candidate counts against a budget of 1e5
// draws; exhaustion raises NumericalFailure naming (m, interval).
ProbabilityVector sample_in_interval(std::size_t m, const Interval& interval,
                                     std::size_t k_max, SplitMix64& rng);

// One (m, interval_a, interval_b, alpha) cell: `trials` independent
// trials, each with a fresh (m-1)-row reference, n source rows, and a
// Dirichlet prior. Sampling failures skip the trial and are counted.
CellStats run_cell(std::size_t m, std::size_t interval_a, std::size_t interval_b,
                   double alpha, const SimulationConfig& cfg, std::size_t cell_index);

// Full sweep over m_values x bin pairs x alphas. Deterministic for a
// given config (including across thread counts).
SimulationReport run_grid(const SimulationConfig& cfg, std::size_t threads = 1);

// CSV emission. The cells file carries one row per cell with the header
// m,interval_A,interval_b,alpha,trials,mean_delta,mean_accuracy_gain,failures
// preceded by comment lines recording the RNG algorithm and seed.
void write_cells_csv(std::ostream& os, const SimulationReport& report);
void write_summary_csv(std::ostream& os, const SimulationReport& report);

}  // namespace can

#endif  // CAN_SIMULATION_HPP_
