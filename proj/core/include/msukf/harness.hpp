#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msukf/filter.hpp"
#include "msukf/models.hpp"
#include "msukf/scaling.hpp"

namespace msukf {

/// Fraction of failed runs above which a candidate is flagged unstable.
inline constexpr double kUnstableFailureFraction = 0.05;

struct MCConfig {
  std::shared_ptr<const ModelSpec> model;
  ScalingSet scaling;
  int runs{100};
  std::uint64_t base_seed{1};
  int transient_discard{0};
  int workers{1};
  double jitter_relative{1e-9};
};

/// Posterior-minus-truth errors of one run: state_dim x duration, column k is step k+1.
struct RunErrors {
  bool failed{false};
  std::string failure;
  Matrix errors;
};

struct MetricsReport {
  Vector rmse_per_state;
  double trmse{0.0};
  std::vector<double> tstd_per_step;
  double tstd_mean{0.0};
  double tstd_final{0.0};
  int runs{0};
  int failed_runs{0};
  /// More than kUnstableFailureFraction of runs failed (or all of them).
  bool unstable{false};
};

/// RMSE / TRMSE / TSTD over the successful runs, in ascending run order.
/// Throws AllRunsFailed when no run succeeded.
[[nodiscard]] MetricsReport compute_metrics(const std::vector<RunErrors>& runs,
                                            int transient_discard = 0);

/// Trajectories for runs j = 0..runs-1 with seeds base_seed + j.
[[nodiscard]] std::vector<Trajectory> simulate_runs(const ModelSpec& model, int runs,
                                                    std::uint64_t base_seed, int workers = 1);

/// Filters one trajectory. Estimation errors are caught and reported as a failed run.
[[nodiscard]] RunErrors run_single(const UnscentedFilter& filter, const Trajectory& traj);

struct MCResult {
  MetricsReport report;
  std::vector<RunErrors> runs;
};

/// Filters pre-simulated trajectories (common random numbers across candidates).
[[nodiscard]] MCResult evaluate(const std::shared_ptr<const ModelSpec>& model,
                                const std::vector<Trajectory>& trajectories,
                                const ScalingSet& scaling, int transient_discard = 0,
                                int workers = 1, double jitter_relative = 1e-9);

[[nodiscard]] MCResult run_mc_detailed(const MCConfig& cfg);
[[nodiscard]] MetricsReport run_mc(const MCConfig& cfg);

enum class Criterion { kTstdMean, kTstdFinal, kTrmse };

[[nodiscard]] std::optional<Criterion> parse_criterion(const std::string& name);
[[nodiscard]] std::string to_string(Criterion c);
[[nodiscard]] double criterion_value(const MetricsReport& report, Criterion c);

struct SweepOptions {
  int runs{100};
  std::uint64_t base_seed{1};
  Criterion criterion{Criterion::kTstdMean};
  int transient_discard{0};
  int workers{1};
  double jitter_relative{1e-9};
};

struct SweepResult {
  std::vector<ScalingSet> grid;
  std::vector<MetricsReport> reports;
  Criterion criterion{Criterion::kTstdMean};
  std::size_t best_index{0};
  double best_value{0.0};

  [[nodiscard]] const ScalingSet& best() const { return grid.at(best_index); }
};

/// Evaluates every candidate on the same trajectories and picks the minimum
/// of the criterion. Unstable candidates are only chosen if every candidate
/// is unstable; ties go to the lexicographically smallest alpha vector.
[[nodiscard]] SweepResult sweep(const std::shared_ptr<const ModelSpec>& model,
                                std::vector<ScalingSet> grid, const SweepOptions& opts);

/// Uniform-alpha candidates.
[[nodiscard]] SweepResult sweep_1d(const std::shared_ptr<const ModelSpec>& model,
                                   const std::vector<double>& alpha_grid, double kappa, double beta,
                                   const SweepOptions& opts);

/// Cartesian product over (alpha_1, alpha_2); only for two-state models.
[[nodiscard]] SweepResult sweep_2d(const std::shared_ptr<const ModelSpec>& model,
                                   const std::vector<double>& alpha1_grid,
                                   const std::vector<double>& alpha2_grid, double kappa,
                                   double beta, const SweepOptions& opts);

struct Candidate {
  std::string label;
  ScalingSet scaling;
};

struct ComparisonRow {
  Candidate candidate;
  MetricsReport report;
  /// Improvement of the first candidate over this one, (base - ours) / base * 100,
  /// on tstd_mean. Empty for the first row.
  std::optional<double> improvement_pct;
  std::vector<RunErrors> runs;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

[[nodiscard]] ComparisonTable compare(const std::shared_ptr<const ModelSpec>& model,
                                      const std::vector<Candidate>& candidates,
                                      const SweepOptions& opts);

/// Inclusive grid start, start+step, ... up to stop (within 1e-9 of a step).
[[nodiscard]] std::vector<double> make_grid(double start, double stop, double step);

// CSV exports. Reals use 17 significant digits.

/// run, step, e1..en
void write_errors_csv(std::ostream& os, const std::vector<RunErrors>& runs);
/// candidate, step, tstd
void write_tstd_csv(std::ostream& os, const ComparisonTable& table, int transient_discard = 0);
/// alpha1..alphan, tstd_mean, tstd_final, rmse1..rmsen, trmse, failed_runs, unstable
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// One row per candidate.
void write_summary_csv(std::ostream& os, const ComparisonTable& table);

}  // namespace msukf
