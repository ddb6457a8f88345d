#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "msukf/commands.hpp"
#include "msukf/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace msukf::cli;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("msukf_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const json& doc) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  CommandOptions options(const fs::path& config, const std::string& out) {
    CommandOptions o;
    o.config_path = config.string();
    o.out_dir = (dir_ / out).string();
    return o;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

json small_compare() {
  return json::parse(R"({
    "model": {"name": "sigmoid2d", "params": {"duration": 50}},
    "candidates": [{"label": "MS-UKF", "alpha": [2.0, 0.01]}, {"label": "UKF", "alpha": 1.6}],
    "mc": {"runs": 4, "base_seed": 1}
  })");
}

}  // namespace

TEST(Config, BundledConfigsParseAndRoundTrip) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(MSUKF_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    SCOPED_TRACE(entry.path().string());
    const ExperimentConfig cfg = load_config(entry.path().string());
    (void)cfg.build_model();
    const json once = to_json(cfg);
    const json twice = to_json(parse_config(once));
    EXPECT_EQ(once, twice);
  }
  EXPECT_GE(seen, 7);
}

TEST(Config, DefaultsCarryExampleSettings) {
  const ExperimentConfig cfg = parse_config(json::parse(R"({"model": {"name": "servo2d"}})"));
  const auto model = cfg.build_model();
  EXPECT_EQ(model->dt, 0.01);
  EXPECT_EQ(model->duration, 600);
  EXPECT_EQ(cfg.runs, 100);
  EXPECT_EQ(cfg.beta, 2.0);
}

TEST(Config, RejectsBadDocuments) {
  const auto rejects = [](const char* text) {
    EXPECT_THROW((void)parse_config(json::parse(text)), ConfigError) << text;
  };
  rejects(R"({"model": {"name": "sigmoid2d"}, "surprise": 1})");
  rejects(R"({"model": {"name": "sigmoid2d", "params": {"dtt": 0.1}}})");
  rejects(R"({"model": {"name": "pendulum"}})");
  rejects(R"({"model": {"name": "sigmoid2d"}, "mc": {"runs": -1}})");
  rejects(R"({"model": {"name": "sigmoid2d"}, "mc": {"runs": "ten"}})");
  rejects(R"({"model": {"name": "sigmoid2d"}, "candidates": [{"label": "x", "alpha": [1, 2, 3]}]})");
  rejects(R"({"model": {"name": "sigmoid2d"}, "candidates": [{"label": "x", "alpha": 0}]})");
  rejects(R"({"model": {"name": "sigmoid2d"}, "sweep": {"kind": "3d"}})");
  rejects(R"({"model": {"name": "sigmoid2d"}, "sweep": {"kind": "1d", "alpha": {"values": [1]}, "criterion": "best"}})");
}

TEST_F(CliTest, CompareWritesSummaryAndTstd) {
  const auto o = options(write_config("c.json", small_compare()), "out");
  ASSERT_EQ(cmd_compare(o, out_, err_), kExitOk) << err_.str();
  const fs::path out = dir_ / "out";
  ASSERT_TRUE(fs::exists(out / "summary.csv"));
  ASSERT_TRUE(fs::exists(out / "tstd_per_step.csv"));
  EXPECT_EQ(line_count(out / "summary.csv"), 3u);
  EXPECT_EQ(line_count(out / "tstd_per_step.csv"), 1u + 2u * 50u);
  EXPECT_NE(out_.str().find("MS-UKF"), std::string::npos);
}

TEST_F(CliTest, CompareWritesErrorsWhenAsked) {
  json doc = small_compare();
  doc["output"] = {{"write_errors", true}};
  const auto o = options(write_config("c.json", doc), "out");
  ASSERT_EQ(cmd_compare(o, out_, err_), kExitOk) << err_.str();
  EXPECT_EQ(line_count(dir_ / "out" / "errors_0.csv"), 1u + 4u * 50u);
}

TEST_F(CliTest, NegativeRunsIsAConfigErrorWithoutOutput) {
  json doc = small_compare();
  doc["mc"]["runs"] = -5;
  const auto o = options(write_config("c.json", doc), "out");
  EXPECT_EQ(cmd_compare(o, out_, err_), kExitConfigError);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, MissingConfigIsAConfigError) {
  CommandOptions o;
  o.config_path = (dir_ / "nope.json").string();
  EXPECT_EQ(cmd_compare(o, out_, err_), kExitConfigError);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  o.config_path = (dir_ / "broken.json").string();
  EXPECT_EQ(cmd_simulate(o, out_, err_), kExitConfigError);
}

TEST_F(CliTest, EmptyGridIsAConfigError) {
  const json doc = json::parse(R"({
    "model": {"name": "sigmoid2d"},
    "sweep": {"kind": "1d", "alpha": {"values": []}}
  })");
  EXPECT_EQ(cmd_sweep(options(write_config("s.json", doc), "out"), out_, err_), kExitConfigError);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, AllRunsFailingIsAnEstimationFailure) {
  // H = 0 and R = 0 make every innovation covariance singular.
  const json doc = json::parse(R"({
    "model": {"name": "linear", "params": {
      "F": [[1.0]], "H": [[0.0]], "Q": [[0.1]], "R": [[0.0]],
      "x0": [0.0], "P0": [[1.0]], "duration": 5}},
    "candidates": [{"label": "UKF", "alpha": 1.0}],
    "mc": {"runs": 3}
  })");
  EXPECT_EQ(cmd_compare(options(write_config("f.json", doc), "out"), out_, err_),
            kExitEstimationFailure);
  EXPECT_NE(err_.str().find("estimation failure"), std::string::npos);
}

TEST_F(CliTest, SweepWritesSurfaceAndBest) {
  const json doc = json::parse(R"({
    "model": {"name": "sigmoid2d", "params": {"duration": 40}},
    "mc": {"runs": 3},
    "sweep": {"kind": "2d", "alpha1": {"values": [1.0, 2.0]},
              "alpha2": {"start": 0.01, "stop": 0.11, "step": 0.05}}
  })");
  ASSERT_EQ(cmd_sweep(options(write_config("s.json", doc), "out"), out_, err_), kExitOk)
      << err_.str();
  EXPECT_EQ(line_count(dir_ / "out" / "sweep_surface.csv"), 1u + 6u);
  const json best = json::parse(slurp(dir_ / "out" / "best.json"));
  EXPECT_EQ(best.at("kind"), "2d");
  EXPECT_EQ(best.at("criterion"), "tstd_mean");
  EXPECT_EQ(best.at("alpha").size(), 2u);
  EXPECT_EQ(best.at("runs"), 3);
  EXPECT_EQ(best.at("value"), best.at("report").at("tstd_mean"));
}

TEST_F(CliTest, SimulateIsByteIdenticalAcrossRuns) {
  const fs::path cfg = fs::path(MSUKF_CONFIG_DIR) / "example1_simulate.json";
  CommandOptions a;
  a.config_path = cfg.string();
  a.out_dir = (dir_ / "a").string();
  CommandOptions b = a;
  b.out_dir = (dir_ / "b").string();
  ASSERT_EQ(cmd_simulate(a, out_, err_), kExitOk) << err_.str();
  ASSERT_EQ(cmd_simulate(b, out_, err_), kExitOk) << err_.str();
  for (const char* name : {"trajectory.csv", "estimates.csv"}) {
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
    EXPECT_EQ(line_count(dir_ / "a" / name), 601u) << name;
  }
  std::ifstream is(dir_ / "a" / "estimates.csv");
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "step,true_x1,true_x2,z1,z2,mean_x1,mean_x2,std_x1,std_x2");
}

TEST_F(CliTest, SeedOverrideChangesTheTrajectory) {
  const fs::path cfg = fs::path(MSUKF_CONFIG_DIR) / "example1_simulate.json";
  CommandOptions a;
  a.config_path = cfg.string();
  a.out_dir = (dir_ / "a").string();
  CommandOptions b = a;
  b.out_dir = (dir_ / "b").string();
  b.seed_override = 99;
  ASSERT_EQ(cmd_simulate(a, out_, err_), kExitOk);
  ASSERT_EQ(cmd_simulate(b, out_, err_), kExitOk);
  EXPECT_NE(slurp(dir_ / "a" / "trajectory.csv"), slurp(dir_ / "b" / "trajectory.csv"));
}

TEST_F(CliTest, NoiselessLinearEstimateConverges) {
  const json doc = json::parse(R"({
    "model": {"name": "linear", "params": {
      "F": [[1.0, 0.1], [0.0, 1.0]], "H": [[1.0, 0.0], [0.0, 1.0]],
      "Q": [[0.0, 0.0], [0.0, 0.0]], "R": [[1e-6, 0.0], [0.0, 1e-6]],
      "x0": [1.0, -0.5], "P0": [[1.0, 0.0], [0.0, 1.0]], "duration": 100}},
    "candidates": [{"label": "MS-UKF", "alpha": [1.2, 0.3]}]
  })");
  ASSERT_EQ(cmd_simulate(options(write_config("l.json", doc), "out"), out_, err_), kExitOk)
      << err_.str();
  std::ifstream is(dir_ / "out" / "estimates.csv");
  std::string line;
  std::string last;
  while (std::getline(is, line)) last = line;
  const auto cells = split(last);
  ASSERT_EQ(cells.size(), 9u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(std::stod(cells[5 + i]), std::stod(cells[1 + i]), 1e-2) << last;
  }
}

TEST(SeedFromEnv, ParsesAndRejects) {
  ::unsetenv("MSUKF_SEED");
  EXPECT_FALSE(seed_from_env().has_value());
  ::setenv("MSUKF_SEED", "1234", 1);
  EXPECT_EQ(seed_from_env(), 1234u);
  ::setenv("MSUKF_SEED", "12x", 1);
  EXPECT_THROW((void)seed_from_env(), ConfigError);
  ::setenv("MSUKF_SEED", "-4", 1);
  EXPECT_THROW((void)seed_from_env(), ConfigError);
  ::unsetenv("MSUKF_SEED");
}

TEST_F(CliTest, BinaryExitCodes) {
  const fs::path bad = write_config("bad.json", json::parse(R"({"model": {"name": "x"}})"));
  const auto run = [](const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string exe = MSUKF_EXE;
  const std::string quiet = " >/dev/null 2>&1";
  EXPECT_EQ(run(exe + " compare --config " + bad.string() + quiet), 2);
  EXPECT_EQ(run(exe + " frobnicate" + quiet), 2);

  const fs::path good = write_config("good.json", small_compare());
  EXPECT_EQ(run(exe + " compare --config " + good.string() + " --workers 2 --out " +
                (dir_ / "out").string() + quiet),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "summary.csv"));

  const std::string env_run = "MSUKF_SEED=5 " + exe + " compare --config " + good.string() +
                              " --out " + (dir_ / "seeded").string() + quiet;
  EXPECT_EQ(run(env_run), 0);
  EXPECT_NE(slurp(dir_ / "out" / "summary.csv"), slurp(dir_ / "seeded" / "summary.csv"));
}
