#include "msukf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "msukf/csv.hpp"
#include "msukf/errors.hpp"

namespace msukf {

namespace {

// Runs body(i) for i in [0, count). Each index is written by exactly one
// worker, so results are independent of scheduling.
template <typename Body>
void parallel_for(int count, int workers, Body&& body) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

MetricsReport failed_report(int runs) {
  MetricsReport r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.trmse = nan;
  r.tstd_mean = nan;
  r.tstd_final = nan;
  r.runs = runs;
  r.failed_runs = runs;
  r.unstable = true;
  return r;
}

bool alpha_less(const ScalingSet& a, const ScalingSet& b) {
  return std::lexicographical_compare(a.alpha.begin(), a.alpha.end(), b.alpha.begin(),
                                      b.alpha.end());
}

}  // namespace

MetricsReport compute_metrics(const std::vector<RunErrors>& runs, int transient_discard) {
  std::vector<const Matrix*> ok;
  for (const auto& r : runs) {
    if (!r.failed) ok.push_back(&r.errors);
  }
  if (ok.empty()) throw AllRunsFailed("all " + std::to_string(runs.size()) + " runs failed");

  const Eigen::Index n = ok.front()->rows();
  const Eigen::Index steps = ok.front()->cols();
  for (const Matrix* e : ok) {
    if (e->rows() != n || e->cols() != steps) {
      throw DimensionMismatch("compute_metrics: runs have different error shapes");
    }
  }
  if (transient_discard < 0 || transient_discard >= steps) {
    throw std::invalid_argument("compute_metrics: transient_discard must be in [0, steps)");
  }

  const auto m = static_cast<double>(ok.size());
  const Eigen::Index kept = steps - transient_discard;

  MetricsReport report;
  report.runs = static_cast<int>(runs.size());
  report.failed_runs = static_cast<int>(runs.size() - ok.size());
  report.unstable = static_cast<double>(report.failed_runs) >
                    kUnstableFailureFraction * static_cast<double>(runs.size());

  Vector sum_sq = Vector::Zero(n);
  report.tstd_per_step.reserve(static_cast<std::size_t>(kept));
  for (Eigen::Index k = transient_discard; k < steps; ++k) {
    Vector mu = Vector::Zero(n);
    for (const Matrix* e : ok) mu += e->col(k);
    mu /= m;
    double spread = 0.0;
    for (const Matrix* e : ok) {
      spread += (e->col(k) - mu).squaredNorm();
      sum_sq += e->col(k).cwiseAbs2();
    }
    report.tstd_per_step.push_back(std::sqrt(spread / m));
  }

  report.rmse_per_state = (sum_sq / (static_cast<double>(kept) * m)).cwiseSqrt();
  report.trmse = report.rmse_per_state.norm();
  double total = 0.0;
  for (double v : report.tstd_per_step) total += v;
  report.tstd_mean = total / static_cast<double>(kept);
  report.tstd_final = report.tstd_per_step.back();
  return report;
}

std::vector<Trajectory> simulate_runs(const ModelSpec& model, int runs, std::uint64_t base_seed,
                                      int workers) {
  if (runs < 1) throw std::invalid_argument("simulate_runs: runs must be >= 1");
  std::vector<Trajectory> out(static_cast<std::size_t>(runs));
  parallel_for(runs, workers, [&](int j) {
    out[static_cast<std::size_t>(j)] = simulate(model, base_seed + static_cast<std::uint64_t>(j));
  });
  return out;
}

RunErrors run_single(const UnscentedFilter& filter, const Trajectory& traj) {
  RunErrors result;
  const auto steps = static_cast<Eigen::Index>(traj.measurements.size());
  result.errors = Matrix::Zero(filter.model().state_dim, steps);
  try {
    StateEstimate est = filter.init();
    for (Eigen::Index k = 0; k < steps; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      Prediction pred = filter.time_update(est);
      UpdateRecord rec = filter.measurement_update(pred.predicted, pred.propagated,
                                                   traj.measurements[idx]);
      result.errors.col(k) = rec.posterior.mean - traj.true_states[idx + 1];
      est = std::move(rec.posterior);
    }
  } catch (const Error& e) {
    result.failed = true;
    result.failure = e.what();
  }
  return result;
}

MCResult evaluate(const std::shared_ptr<const ModelSpec>& model,
                  const std::vector<Trajectory>& trajectories, const ScalingSet& scaling,
                  int transient_discard, int workers, double jitter_relative) {
  const UnscentedFilter filter(FilterConfig{scaling, jitter_relative, model});
  MCResult result;
  result.runs.resize(trajectories.size());
  parallel_for(static_cast<int>(trajectories.size()), workers, [&](int j) {
    const auto idx = static_cast<std::size_t>(j);
    result.runs[idx] = run_single(filter, trajectories[idx]);
  });
  result.report = compute_metrics(result.runs, transient_discard);
  return result;
}

MCResult run_mc_detailed(const MCConfig& cfg) {
  if (!cfg.model) throw std::invalid_argument("run_mc: model is required");
  const auto trajectories = simulate_runs(*cfg.model, cfg.runs, cfg.base_seed, cfg.workers);
  return evaluate(cfg.model, trajectories, cfg.scaling, cfg.transient_discard, cfg.workers,
                  cfg.jitter_relative);
}

MetricsReport run_mc(const MCConfig& cfg) { return run_mc_detailed(cfg).report; }

std::optional<Criterion> parse_criterion(const std::string& name) {
  if (name == "tstd_mean") return Criterion::kTstdMean;
  if (name == "tstd_final") return Criterion::kTstdFinal;
  if (name == "trmse") return Criterion::kTrmse;
  return std::nullopt;
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::kTstdMean:
      return "tstd_mean";
    case Criterion::kTstdFinal:
      return "tstd_final";
    case Criterion::kTrmse:
      return "trmse";
  }
  return "unknown";
}

double criterion_value(const MetricsReport& report, Criterion c) {
  switch (c) {
    case Criterion::kTstdMean:
      return report.tstd_mean;
    case Criterion::kTstdFinal:
      return report.tstd_final;
    case Criterion::kTrmse:
      return report.trmse;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SweepResult sweep(const std::shared_ptr<const ModelSpec>& model, std::vector<ScalingSet> grid,
                  const SweepOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("sweep: grid is empty");
  if (!model) throw std::invalid_argument("sweep: model is required");

  const auto trajectories = simulate_runs(*model, opts.runs, opts.base_seed, opts.workers);

  SweepResult result;
  result.criterion = opts.criterion;
  result.reports.reserve(grid.size());
  for (const auto& scaling : grid) {
    try {
      result.reports.push_back(evaluate(model, trajectories, scaling, opts.transient_discard,
                                        opts.workers, opts.jitter_relative)
                                   .report);
    } catch (const AllRunsFailed&) {
      result.reports.push_back(failed_report(opts.runs));
    }
  }
  result.grid = std::move(grid);

  const bool any_stable = std::any_of(result.reports.begin(), result.reports.end(),
                                      [](const MetricsReport& r) { return !r.unstable; });
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    const MetricsReport& r = result.reports[i];
    if (any_stable && r.unstable) continue;
    const double v = criterion_value(r, opts.criterion);
    if (std::isnan(v)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double bv = criterion_value(result.reports[*best], opts.criterion);
    if (v < bv || (v == bv && alpha_less(result.grid[i], result.grid[*best]))) best = i;
  }
  if (!best) throw AllRunsFailed("sweep: every candidate failed");
  result.best_index = *best;
  result.best_value = criterion_value(result.reports[*best], opts.criterion);
  return result;
}

SweepResult sweep_1d(const std::shared_ptr<const ModelSpec>& model,
                     const std::vector<double>& alpha_grid, double kappa, double beta,
                     const SweepOptions& opts) {
  if (!model) throw std::invalid_argument("sweep_1d: model is required");
  std::vector<ScalingSet> grid;
  grid.reserve(alpha_grid.size());
  for (double a : alpha_grid) grid.push_back(standard_scaling(a, kappa, beta, model->state_dim));
  return sweep(model, std::move(grid), opts);
}

SweepResult sweep_2d(const std::shared_ptr<const ModelSpec>& model,
                     const std::vector<double>& alpha1_grid,
                     const std::vector<double>& alpha2_grid, double kappa, double beta,
                     const SweepOptions& opts) {
  if (!model) throw std::invalid_argument("sweep_2d: model is required");
  if (model->state_dim != 2) throw DimensionMismatch("sweep_2d: model must have two states");
  std::vector<ScalingSet> grid;
  grid.reserve(alpha1_grid.size() * alpha2_grid.size());
  for (double a1 : alpha1_grid) {
    for (double a2 : alpha2_grid) {
      grid.push_back(make_scaling((Vector(2) << a1, a2).finished(), Vector::Constant(2, kappa), beta));
    }
  }
  return sweep(model, std::move(grid), opts);
}

ComparisonTable compare(const std::shared_ptr<const ModelSpec>& model,
                        const std::vector<Candidate>& candidates, const SweepOptions& opts) {
  if (candidates.empty()) throw std::invalid_argument("compare: no candidates");
  if (!model) throw std::invalid_argument("compare: model is required");
  for (const auto& c : candidates) {
    if (c.scaling.dimension() != model->state_dim) {
      throw DimensionMismatch("compare: candidate '" + c.label + "' has the wrong dimension");
    }
  }

  const auto trajectories = simulate_runs(*model, opts.runs, opts.base_seed, opts.workers);
  ComparisonTable table;
  for (const auto& c : candidates) {
    MCResult r = evaluate(model, trajectories, c.scaling, opts.transient_discard, opts.workers,
                          opts.jitter_relative);
    table.rows.push_back(ComparisonRow{c, std::move(r.report), std::nullopt, std::move(r.runs)});
  }
  const double ours = table.rows.front().report.tstd_mean;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double base = table.rows[i].report.tstd_mean;
    table.rows[i].improvement_pct = (base - ours) / base * 100.0;
  }
  return table;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start) {
    throw std::invalid_argument("make_grid: need finite start <= stop and step > 0");
  }
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + 1e-9 * step) break;
    out.push_back(v);
  }
  return out;
}

void write_errors_csv(std::ostream& os, const std::vector<RunErrors>& runs) {
  Eigen::Index n = 0;
  for (const auto& r : runs) n = std::max(n, r.errors.rows());
  CsvWriter csv(os);
  csv.cell("run").cell("step");
  for (Eigen::Index l = 0; l < n; ++l) csv.cell("e" + std::to_string(l + 1));
  csv.end_row();
  for (std::size_t j = 0; j < runs.size(); ++j) {
    if (runs[j].failed) continue;
    const Matrix& e = runs[j].errors;
    for (Eigen::Index k = 0; k < e.cols(); ++k) {
      csv.cell(static_cast<long long>(j)).cell(static_cast<long long>(k + 1));
      for (Eigen::Index l = 0; l < e.rows(); ++l) csv.cell(e(l, k));
      csv.end_row();
    }
  }
}

void write_tstd_csv(std::ostream& os, const ComparisonTable& table, int transient_discard) {
  CsvWriter csv(os);
  csv.cell("candidate").cell("step").cell("tstd").end_row();
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.report.tstd_per_step.size(); ++k) {
      csv.cell(row.candidate.label)
          .cell(static_cast<long long>(k) + 1 + transient_discard)
          .cell(row.report.tstd_per_step[k])
          .end_row();
    }
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  const Eigen::Index n = result.grid.empty() ? 0 : result.grid.front().dimension();
  CsvWriter csv(os);
  for (Eigen::Index i = 0; i < n; ++i) csv.cell("alpha" + std::to_string(i + 1));
  csv.cell("tstd_mean").cell("tstd_final");
  for (Eigen::Index i = 0; i < n; ++i) csv.cell("rmse" + std::to_string(i + 1));
  csv.cell("trmse").cell("failed_runs").cell("unstable").end_row();
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    const MetricsReport& r = result.reports[g];
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(result.grid[g].alpha(i));
    csv.cell(r.tstd_mean).cell(r.tstd_final);
    for (Eigen::Index i = 0; i < n; ++i) {
      csv.cell(i < r.rmse_per_state.size() ? r.rmse_per_state(i)
                                           : std::numeric_limits<double>::quiet_NaN());
    }
    csv.cell(r.trmse).cell(r.failed_runs).cell(r.unstable ? 1 : 0).end_row();
  }
}

void write_summary_csv(std::ostream& os, const ComparisonTable& table) {
  const Eigen::Index n = table.rows.empty() ? 0 : table.rows.front().candidate.scaling.dimension();
  CsvWriter csv(os);
  csv.cell("method");
  for (Eigen::Index i = 0; i < n; ++i) csv.cell("alpha" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < n; ++i) csv.cell("kappa" + std::to_string(i + 1));
  csv.cell("beta").cell("tstd_mean").cell("tstd_final");
  for (Eigen::Index i = 0; i < n; ++i) csv.cell("rmse" + std::to_string(i + 1));
  csv.cell("trmse").cell("failed_runs").cell("unstable").cell("improvement_pct").end_row();
  for (const auto& row : table.rows) {
    const ScalingSet& s = row.candidate.scaling;
    csv.cell(row.candidate.label);
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(s.alpha(i));
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(s.kappa(i));
    csv.cell(s.beta).cell(row.report.tstd_mean).cell(row.report.tstd_final);
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(row.report.rmse_per_state(i));
    csv.cell(row.report.trmse).cell(row.report.failed_runs).cell(row.report.unstable ? 1 : 0);
    if (row.improvement_pct) {
      csv.cell(*row.improvement_pct);
    } else {
      csv.cell("");
    }
    csv.end_row();
  }
}

}  // namespace msukf
