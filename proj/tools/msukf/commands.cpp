#include "msukf/commands.hpp"

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "msukf/config.hpp"
#include "msukf/csv.hpp"
#include "msukf/errors.hpp"

namespace msukf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Prepared {
  ExperimentConfig cfg;
  std::shared_ptr<const ModelSpec> model;
  fs::path out_dir;
};

Prepared prepare(const CommandOptions& opts) {
  Prepared p;
  p.cfg = load_config(opts.config_path);
  if (opts.seed_override) p.cfg.base_seed = *opts.seed_override;
  p.model = p.cfg.build_model();
  p.out_dir = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(p.cfg.output_dir);
  return p;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  return os;
}

std::string alpha_text(const ScalingSet& s) {
  std::string text = "(";
  for (Eigen::Index i = 0; i < s.alpha.size(); ++i) {
    if (i) text += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", s.alpha(i));
    text += buf;
  }
  return text + ")";
}

json report_json(const MetricsReport& r) {
  return {{"tstd_mean", r.tstd_mean},
          {"tstd_final", r.tstd_final},
          {"rmse", std::vector<double>(r.rmse_per_state.begin(), r.rmse_per_state.end())},
          {"trmse", r.trmse},
          {"runs", r.runs},
          {"failed_runs", r.failed_runs},
          {"unstable", r.unstable}};
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "estimation failure: " << e.what() << '\n';
    return kExitEstimationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitEstimationFailure;
  }
}

}  // namespace

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("MSUKF_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || *end != '\0' || raw[0] == '-') {
    throw ConfigError(std::string("MSUKF_SEED: '") + raw + "' is not a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(opts);
    const auto candidates = p.cfg.build_candidates(p.model->state_dim);
    if (candidates.empty()) throw ConfigError("compare: 'candidates' must list at least one scaling");

    const ComparisonTable table = compare(p.model, candidates, p.cfg.sweep_options(opts.workers));

    fs::create_directories(p.out_dir);
    {
      auto os = open_output(p.out_dir / "summary.csv");
      write_summary_csv(os, table);
    }
    {
      auto os = open_output(p.out_dir / "tstd_per_step.csv");
      write_tstd_csv(os, table, p.cfg.transient_discard);
    }
    if (p.cfg.write_errors) {
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto os = open_output(p.out_dir / ("errors_" + std::to_string(i) + ".csv"));
        write_errors_csv(os, table.rows[i].runs);
      }
    }

    out << std::left << std::setw(32) << "method" << std::right << std::setw(12) << "TSTD"
        << std::setw(12) << "TRMSE" << std::setw(10) << "failed" << std::setw(14) << "improvement"
        << '\n';
    for (const auto& row : table.rows) {
      out << std::left << std::setw(32) << (row.candidate.label + " " + alpha_text(row.candidate.scaling))
          << std::right << std::fixed << std::setprecision(4) << std::setw(12)
          << row.report.tstd_mean << std::setw(12) << row.report.trmse << std::setw(10)
          << row.report.failed_runs;
      if (row.improvement_pct) {
        out << std::setw(13) << std::setprecision(1) << *row.improvement_pct << '%';
      } else {
        out << std::setw(14) << "-";
      }
      out << (row.report.unstable ? "  (unstable)" : "") << '\n';
    }
    out.unsetf(std::ios::floatfield);
    return kExitOk;
  });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(opts);
    if (!p.cfg.sweep) throw ConfigError("sweep: config has no 'sweep' section");
    const SweepConfig& sc = *p.cfg.sweep;
    const SweepOptions so = p.cfg.sweep_options(opts.workers);

    const SweepResult result =
        sc.kind == "1d"
            ? sweep_1d(p.model, sc.alpha->expand(), sc.kappa, p.cfg.beta, so)
            : sweep_2d(p.model, sc.alpha1->expand(), sc.alpha2->expand(), sc.kappa, p.cfg.beta, so);

    fs::create_directories(p.out_dir);
    {
      auto os = open_output(p.out_dir / "sweep_surface.csv");
      write_sweep_csv(os, result);
    }
    const ScalingSet& best = result.best();
    const json best_doc = {
        {"kind", sc.kind},
        {"criterion", to_string(result.criterion)},
        {"value", result.best_value},
        {"alpha", std::vector<double>(best.alpha.begin(), best.alpha.end())},
        {"kappa", std::vector<double>(best.kappa.begin(), best.kappa.end())},
        {"beta", best.beta},
        {"runs", so.runs},
        {"base_seed", so.base_seed},
        {"report", report_json(result.reports[result.best_index])}};
    {
      auto os = open_output(p.out_dir / "best.json");
      os << best_doc.dump(2) << '\n';
    }
    out << "best alpha " << alpha_text(best) << "  " << to_string(result.criterion) << " = "
        << format_real(result.best_value) << " over " << result.grid.size() << " candidates\n";
    return kExitOk;
  });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(opts);
    const auto candidates = p.cfg.build_candidates(p.model->state_dim);
    const ScalingSet scaling =
        candidates.empty() ? standard_scaling(1.0, 0.0, p.cfg.beta, p.model->state_dim)
                           : candidates.at(p.cfg.simulate_candidate).scaling;

    const Trajectory traj = simulate(*p.model, p.cfg.base_seed);
    const UnscentedFilter filter(FilterConfig{scaling, p.cfg.jitter_relative, p.model});
    std::vector<std::optional<Vector>> zs(traj.measurements.begin(), traj.measurements.end());
    const auto records = filter.run(filter.init(), zs);

    fs::create_directories(p.out_dir);
    {
      auto os = open_output(p.out_dir / "trajectory.csv");
      write_trajectory_csv(os, traj);
    }
    {
      auto os = open_output(p.out_dir / "estimates.csv");
      const Eigen::Index n = p.model->state_dim;
      const Eigen::Index m = p.model->measurement_dim;
      CsvWriter csv(os);
      csv.cell("step");
      for (Eigen::Index i = 0; i < n; ++i) csv.cell("true_x" + std::to_string(i + 1));
      for (Eigen::Index i = 0; i < m; ++i) csv.cell("z" + std::to_string(i + 1));
      for (Eigen::Index i = 0; i < n; ++i) csv.cell("mean_x" + std::to_string(i + 1));
      for (Eigen::Index i = 0; i < n; ++i) csv.cell("std_x" + std::to_string(i + 1));
      csv.end_row();
      for (std::size_t k = 0; k < records.size(); ++k) {
        const StateEstimate& post = records[k].posterior;
        csv.cell(static_cast<long long>(k + 1));
        for (Eigen::Index i = 0; i < n; ++i) csv.cell(traj.true_states[k + 1](i));
        for (Eigen::Index i = 0; i < m; ++i) csv.cell(traj.measurements[k](i));
        for (Eigen::Index i = 0; i < n; ++i) csv.cell(post.mean(i));
        for (Eigen::Index i = 0; i < n; ++i) csv.cell(std::sqrt(post.cov(i, i)));
        csv.end_row();
      }
    }
    out << "simulated " << records.size() << " steps of " << p.model->name << " with alpha "
        << alpha_text(scaling) << " (seed " << p.cfg.base_seed << ")\n";
    return kExitOk;
  });
}

}  // namespace msukf::cli
