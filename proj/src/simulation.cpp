#include "can/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "can/core_an.hpp"
#include "can/metrics.hpp"
#include "can/parallel.hpp"

namespace can {

namespace {

constexpr std::size_t kDrawBudget = 100000;
constexpr std::size_t kRejectionDraws = 64;
constexpr std::size_t kBisectionSteps = 48;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

std::string Interval::label() const {
  return std::string("[") + format_number(lo) + "-" + format_number(hi) +
         (closed_hi ? "]" : ")");
}

std::array<Interval, 4> default_intervals() {
  return {Interval{0.0, 0.25, false}, Interval{0.25, 0.5, false},
          Interval{0.5, 0.75, false}, Interval{0.75, 1.0, true}};
}

SimulationConfig SimulationConfig::defaults() {
  SimulationConfig cfg;
  for (std::size_t m = 2; m <= 10; ++m) cfg.m_values.push_back(m);
  for (std::size_t m = 20; m <= 100; m += 10) cfg.m_values.push_back(m);
  for (int i = 1; i <= 9; ++i) cfg.alphas.push_back(0.1 * i);
  for (int a = 1; a <= 9; ++a) cfg.alphas.push_back(a);
  return cfg;
}

void SimulationConfig::validate() const {
  if (m_values.empty()) throw InvalidInput("simulation needs at least one class count");
  for (std::size_t m : m_values) {
    if (m < 2) throw InvalidInput("simulation class counts must be at least 2");
  }
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  if (n < 1) throw InvalidInput("n must be at least 1");
  if (alphas.empty()) throw InvalidInput("simulation needs at least one alpha");
  for (double a : alphas) {
    if (!(a > 0.0)) throw InvalidInput("alphas must be positive");
  }
  if (depth < 1) throw InvalidInput("depth must be at least 1");
  if (k_max < 2) throw InvalidInput("k_max must be at least 2");
}

double CellStats::mean_delta() const {
  return delta_count == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : delta_sum / static_cast<double>(delta_count);
}

double CellStats::mean_accuracy_gain() const {
  return trials_done == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : acc_gain_sum / static_cast<double>(trials_done);
}

ProbabilityVector sample_in_interval(std::size_t m, const Interval& interval,
                                     std::size_t k_max, SplitMix64& rng) {
  if (m < 2) throw InvalidInput("sampling needs at least 2 classes");
  const std::size_t k_eff = std::min(std::max<std::size_t>(k_max, 2), m);

  // The score is bounded by log_m(k_eff), attained by uniform mass on
  // k_eff entries; a bin lying strictly above that is unreachable.
  const double sup_score =
      std::log(static_cast<double>(k_eff)) / std::log(static_cast<double>(m));
  auto fail = [&]() -> ProbabilityVector {
    throw NumericalFailure("sampling failure: no vector with ambiguity in " +
                           interval.label() + " for m = " + std::to_string(m) +
                           " within the draw budget");
  };
  if (interval.lo > sup_score) fail();

  // Same quantity as ambiguity_score, computed on a scratch buffer to
  // keep the rejection loop allocation-free.
  const double log_m = std::log(static_cast<double>(m));
  std::vector<double> sorted(m);
  auto score_of = [&](const std::vector<double>& v) {
    sorted.assign(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    auto term = [&](double x) { return x > 0.0 ? -x * std::log(x) / log_m : 0.0; };
    double h = term(sorted[0]) + term(sorted[1]);
    double best = h;
    for (std::size_t k = 3; k <= k_eff; ++k) {
      h += term(sorted[k - 1]);
      best = std::max(best, h);
    }
    return best;
  };

  std::size_t draws = 0;
  std::vector<double> v(m);
  auto draw_dirichlet = [&](std::vector<double>& out) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      out[j] = -std::log1p(-rng.next_double());
      sum += out[j];
    }
    if (sum == 0.0) {
      std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(m));
      return;
    }
    for (double& x : out) x /= sum;
  };

  // Plain rejection from the flat Dirichlet.
  while (draws < kRejectionDraws) {
    draw_dirichlet(v);
    ++draws;
    if (interval.contains(score_of(v))) return ProbabilityVector(v);
  }

  // Temperature fallback: bisect t on renormalized powers of a fresh
  // draw. The score decreases in t (sharpening), so steer t down when
  // below the bin and up when above.
  std::vector<double> base(m), w(m);
  while (draws < kDrawBudget) {
    draw_dirichlet(base);
    ++draws;
    const double base_max = *std::max_element(base.begin(), base.end());
    if (base_max <= 0.0) continue;
    double t_lo = 1.0 / 1024.0, t_hi = 4096.0;
    for (std::size_t step = 0; step < kBisectionSteps && draws < kDrawBudget; ++step) {
      const double t = std::sqrt(t_lo * t_hi);
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        w[j] = base[j] > 0.0 ? std::pow(base[j] / base_max, t) : 0.0;
        sum += w[j];
      }
      for (double& x : w) x /= sum;
      ++draws;
      const double s = score_of(w);
      if (interval.contains(s)) return ProbabilityVector(w);
      if (s < interval.lo) {
        t_hi = t;  // too sharp, flatten
      } else {
        t_lo = t;  // too ambiguous, sharpen
      }
      if (t_hi - t_lo < 1e-12 * t_hi) break;  // converged without a hit
    }
  }
  return fail();
}

CellStats run_cell(std::size_t m, std::size_t interval_a, std::size_t interval_b,
                   double alpha, const SimulationConfig& cfg, std::size_t cell_index) {
  cfg.validate();
  CellStats stats;
  stats.m = m;
  stats.interval_a = interval_a;
  stats.interval_b = interval_b;
  stats.alpha = alpha;

  const Interval& bin_a = cfg.intervals[interval_a];
  const Interval& bin_b = cfg.intervals[interval_b];
  const std::size_t ref_rows = m - 1;  // square working matrix
  const CanHyperParams hp{alpha, cfg.depth, 0.5, std::max<std::size_t>(cfg.k_max, 2)};

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    SplitMix64 rng = derive_stream(cfg.seed, cell_index, trial);
    try {
      std::vector<ProbabilityVector> a_rows;
      a_rows.reserve(ref_rows);
      for (std::size_t i = 0; i < ref_rows; ++i) {
        a_rows.push_back(sample_in_interval(m, bin_a, cfg.k_max, rng));
      }
      std::vector<ProbabilityVector> b0_rows;
      b0_rows.reserve(cfg.n);
      for (std::size_t i = 0; i < cfg.n; ++i) {
        b0_rows.push_back(sample_in_interval(m, bin_b, cfg.k_max, rng));
      }
      const PriorVector q(sample_dirichlet(m, rng));
      const ReferenceMatrix reference(a_rows);

      std::vector<ProbabilityVector> b1_rows;
      b1_rows.reserve(cfg.n);
      double trial_delta_sum = 0.0;
      for (const ProbabilityVector& b0 : b0_rows) {
        b1_rows.push_back(readjust(b0, reference, q, hp));
        trial_delta_sum += expected_gain(q, b0, b1_rows.back());
      }
      stats.acc_gain_sum += accuracy_gain(q, b0_rows, b1_rows);
      stats.delta_sum += trial_delta_sum;
      stats.delta_count += cfg.n;
      stats.trials_done += 1;
    } catch (const NumericalFailure&) {
      stats.failures += 1;
    }
  }
  return stats;
}

SimulationReport run_grid(const SimulationConfig& cfg, std::size_t threads) {
  cfg.validate();
  struct CellSpec {
    std::size_t m, ia, ib;
    double alpha;
  };
  std::vector<CellSpec> specs;
  for (std::size_t m : cfg.m_values) {
    for (std::size_t ia = 0; ia < cfg.intervals.size(); ++ia) {
      for (std::size_t ib = 0; ib < cfg.intervals.size(); ++ib) {
        for (double alpha : cfg.alphas) specs.push_back({m, ia, ib, alpha});
      }
    }
  }

  SimulationReport report;
  report.rng_algorithm = kRngAlgorithm;
  report.seed = cfg.seed;
  report.intervals = cfg.intervals;
  report.cells.resize(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) {
    const CellSpec& s = specs[i];
    report.cells[i] = run_cell(s.m, s.ia, s.ib, s.alpha, cfg, i);
  });
  return report;
}

std::array<std::array<SummaryCell, 4>, 4> SimulationReport::summary() const {
  std::array<std::array<SummaryCell, 4>, 4> grid{};
  std::array<std::array<double, 4>, 4> delta_sums{};
  std::array<std::array<double, 4>, 4> gain_sums{};
  for (const CellStats& c : cells) {
    SummaryCell& cell = grid[c.interval_a][c.interval_b];
    delta_sums[c.interval_a][c.interval_b] += c.delta_sum;
    gain_sums[c.interval_a][c.interval_b] += c.acc_gain_sum;
    cell.delta_count += c.delta_count;
    cell.trials += c.trials_done;
    cell.failures += c.failures;
  }
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      SummaryCell& cell = grid[a][b];
      cell.mean_delta = cell.delta_count == 0
                            ? std::numeric_limits<double>::quiet_NaN()
                            : delta_sums[a][b] / static_cast<double>(cell.delta_count);
      cell.mean_accuracy_gain = cell.trials == 0
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : gain_sums[a][b] / static_cast<double>(cell.trials);
    }
  }
  return grid;
}

void write_cells_csv(std::ostream& os, const SimulationReport& report) {
  os << "# rng=" << report.rng_algorithm << " seed=" << report.seed << "\n";
  os << "m,interval_A,interval_b,alpha,trials,mean_delta,mean_accuracy_gain,failures\n";
  for (const CellStats& c : report.cells) {
    os << c.m << ',' << report.intervals[c.interval_a].label() << ','
       << report.intervals[c.interval_b].label() << ',' << format_number(c.alpha) << ','
       << c.trials_done << ',' << format_number(c.mean_delta()) << ','
       << format_number(c.mean_accuracy_gain()) << ',' << c.failures << '\n';
  }
}

void write_summary_csv(std::ostream& os, const SimulationReport& report) {
  os << "# rng=" << report.rng_algorithm << " seed=" << report.seed << "\n";
  os << "interval_A,interval_b,mean_delta,mean_accuracy_gain,rows,trials,failures\n";
  const auto grid = report.summary();
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      const SummaryCell& cell = grid[a][b];
      os << report.intervals[a].label() << ',' << report.intervals[b].label() << ','
         << format_number(cell.mean_delta) << ','
         << format_number(cell.mean_accuracy_gain) << ',' << cell.delta_count << ','
         << cell.trials << ',' << cell.failures << '\n';
    }
  }
}

}  // namespace can
