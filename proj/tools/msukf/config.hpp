#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "msukf/harness.hpp"
#include "msukf/models.hpp"

namespace msukf::cli {

/// Invalid or unreadable experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Either an explicit list or an inclusive start/stop/step range.
struct GridSpec {
  std::optional<std::vector<double>> values;
  double start{0.0};
  double stop{0.0};
  double step{0.0};

  [[nodiscard]] std::vector<double> expand() const;
};

struct CandidateSpec {
  std::string label;
  std::vector<double> alpha;  // one entry means "uniform"
  std::vector<double> kappa;  // empty or one entry means "uniform"
};

struct ModelConfig {
  std::string name{"sigmoid2d"};
  std::variant<Sigmoid2dParams, Servo2dParams, LinearParams> params{Sigmoid2dParams{}};
};

struct SweepConfig {
  std::string kind{"1d"};  // "1d" | "2d"
  std::optional<GridSpec> alpha;
  std::optional<GridSpec> alpha1;
  std::optional<GridSpec> alpha2;
  double kappa{0.0};
  Criterion criterion{Criterion::kTstdMean};
};

struct ExperimentConfig {
  ModelConfig model;
  double beta{2.0};
  double jitter_relative{1e-9};
  std::vector<CandidateSpec> candidates;
  int runs{100};
  std::uint64_t base_seed{1};
  int transient_discard{0};
  std::optional<SweepConfig> sweep;
  std::size_t simulate_candidate{0};
  std::string output_dir{"results"};
  bool write_errors{false};

  /// Builds the model; throws ConfigError on invalid parameters.
  [[nodiscard]] std::shared_ptr<const ModelSpec> build_model() const;
  /// Resolves candidates against the model dimension; throws ConfigError.
  [[nodiscard]] std::vector<Candidate> build_candidates(Eigen::Index n) const;
  [[nodiscard]] SweepOptions sweep_options(int workers) const;
};

/// Parses and validates. Unknown keys are rejected. Throws ConfigError.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Full document with every default written out.
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace msukf::cli
