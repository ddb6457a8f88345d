#include "msukf/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "msukf/errors.hpp"

namespace msukf::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

double get_real(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

std::vector<double> get_reals(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(where + ": expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_real(e, where));
  return out;
}

Vector get_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = get_real(v[i], where);
  }
  return out;
}

Matrix get_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
    throw ConfigError(where + ": expected a non-empty array of rows");
  }
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array() || v[r].size() != cols) throw ConfigError(where + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = get_real(v[r][c], where);
    }
  }
  return out;
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Sigmoid2dParams parse_sigmoid(const json& j) {
  const std::string w = "model.params";
  check_keys(j, {"dt", "duration", "x0", "a", "b", "g", "q", "r", "H", "P0"}, w);
  Sigmoid2dParams p;
  if (j.contains("dt")) p.dt = get_real(j["dt"], w + ".dt");
  if (j.contains("duration")) p.duration = get_int(j["duration"], w + ".duration");
  if (j.contains("x0")) p.x0 = get_vector(j["x0"], w + ".x0");
  if (j.contains("a")) p.a = get_vector(j["a"], w + ".a");
  if (j.contains("b")) p.b = get_vector(j["b"], w + ".b");
  if (j.contains("g")) p.g = get_real(j["g"], w + ".g");
  if (j.contains("q")) p.q = get_vector(j["q"], w + ".q");
  if (j.contains("r")) p.r = get_vector(j["r"], w + ".r");
  if (j.contains("H")) p.h = get_matrix(j["H"], w + ".H");
  if (j.contains("P0")) p.p0 = get_matrix(j["P0"], w + ".P0");
  return p;
}

Servo2dParams parse_servo(const json& j) {
  const std::string w = "model.params";
  check_keys(j,
             {"dt", "duration", "x0", "a", "b", "cogging_amplitude", "cogging_harmonic", "q", "r",
              "H", "P0", "x2_couples_to_x1"},
             w);
  Servo2dParams p;
  if (j.contains("dt")) p.dt = get_real(j["dt"], w + ".dt");
  if (j.contains("duration")) p.duration = get_int(j["duration"], w + ".duration");
  if (j.contains("x0")) p.x0 = get_vector(j["x0"], w + ".x0");
  if (j.contains("a")) p.a = get_vector(j["a"], w + ".a");
  if (j.contains("b")) p.b = get_vector(j["b"], w + ".b");
  if (j.contains("cogging_amplitude")) {
    p.cogging_amplitude = get_real(j["cogging_amplitude"], w + ".cogging_amplitude");
  }
  if (j.contains("cogging_harmonic")) {
    p.cogging_harmonic = get_real(j["cogging_harmonic"], w + ".cogging_harmonic");
  }
  if (j.contains("q")) p.q = get_vector(j["q"], w + ".q");
  if (j.contains("r")) p.r = get_vector(j["r"], w + ".r");
  if (j.contains("H")) p.h = get_matrix(j["H"], w + ".H");
  if (j.contains("P0")) p.p0 = get_matrix(j["P0"], w + ".P0");
  if (j.contains("x2_couples_to_x1")) {
    if (!j["x2_couples_to_x1"].is_boolean()) throw ConfigError(w + ".x2_couples_to_x1: expected a boolean");
    p.x2_couples_to_x1 = j["x2_couples_to_x1"].get<bool>();
  }
  return p;
}

LinearParams parse_linear(const json& j) {
  const std::string w = "model.params";
  check_keys(j, {"F", "H", "Q", "R", "x0", "P0", "dt", "duration"}, w);
  for (const char* key : {"F", "H", "Q", "R", "x0", "P0"}) {
    if (!j.contains(key)) throw ConfigError(w + ": linear model requires '" + key + "'");
  }
  LinearParams p;
  p.f = get_matrix(j["F"], w + ".F");
  p.h = get_matrix(j["H"], w + ".H");
  p.q = get_matrix(j["Q"], w + ".Q");
  p.r = get_matrix(j["R"], w + ".R");
  p.x0 = get_vector(j["x0"], w + ".x0");
  p.p0 = get_matrix(j["P0"], w + ".P0");
  if (j.contains("dt")) p.dt = get_real(j["dt"], w + ".dt");
  if (j.contains("duration")) p.duration = get_int(j["duration"], w + ".duration");
  return p;
}

json params_json(const ModelConfig& m) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Sigmoid2dParams>) {
          return {{"dt", p.dt},           {"duration", p.duration}, {"x0", vector_json(p.x0)},
                  {"a", vector_json(p.a)}, {"b", vector_json(p.b)},  {"g", p.g},
                  {"q", vector_json(p.q)}, {"r", vector_json(p.r)},  {"H", matrix_json(p.h)},
                  {"P0", matrix_json(p.p0)}};
        } else if constexpr (std::is_same_v<P, Servo2dParams>) {
          return {{"dt", p.dt},
                  {"duration", p.duration},
                  {"x0", vector_json(p.x0)},
                  {"a", vector_json(p.a)},
                  {"b", vector_json(p.b)},
                  {"cogging_amplitude", p.cogging_amplitude},
                  {"cogging_harmonic", p.cogging_harmonic},
                  {"q", vector_json(p.q)},
                  {"r", vector_json(p.r)},
                  {"H", matrix_json(p.h)},
                  {"P0", matrix_json(p.p0)},
                  {"x2_couples_to_x1", p.x2_couples_to_x1}};
        } else {
          return {{"F", matrix_json(p.f)},   {"H", matrix_json(p.h)},   {"Q", matrix_json(p.q)},
                  {"R", matrix_json(p.r)},   {"x0", vector_json(p.x0)}, {"P0", matrix_json(p.p0)},
                  {"dt", p.dt},              {"duration", p.duration}};
        }
      },
      m.params);
}

GridSpec parse_grid(const json& j, const std::string& where) {
  GridSpec g;
  if (j.is_array()) {
    g.values = get_reals(j, where);
  } else {
    check_keys(j, {"values", "start", "stop", "step"}, where);
    if (j.contains("values")) {
      if (j.contains("start") || j.contains("stop") || j.contains("step")) {
        throw ConfigError(where + ": give either 'values' or 'start'/'stop'/'step'");
      }
      g.values = get_reals(j["values"], where + ".values");
    } else {
      for (const char* key : {"start", "stop", "step"}) {
        if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
      }
      g.start = get_real(j["start"], where + ".start");
      g.stop = get_real(j["stop"], where + ".stop");
      g.step = get_real(j["step"], where + ".step");
    }
  }
  std::vector<double> expanded;
  try {
    expanded = g.expand();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (expanded.empty()) throw ConfigError(where + ": grid is empty");
  for (double a : expanded) {
    if (!(a > 0.0)) throw ConfigError(where + ": alpha values must be > 0");
  }
  return g;
}

json grid_json(const GridSpec& g) {
  if (g.values) return {{"values", *g.values}};
  return {{"start", g.start}, {"stop", g.stop}, {"step", g.step}};
}

}  // namespace

std::vector<double> GridSpec::expand() const {
  if (values) return *values;
  return make_grid(start, stop, step);
}

std::shared_ptr<const ModelSpec> ExperimentConfig::build_model() const {
  try {
    return std::visit(
        [](const auto& p) -> std::shared_ptr<const ModelSpec> {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, Sigmoid2dParams>) {
            return std::make_shared<const ModelSpec>(sigmoid2d_model(p));
          } else if constexpr (std::is_same_v<P, Servo2dParams>) {
            return std::make_shared<const ModelSpec>(servo2d_model(p));
          } else {
            return std::make_shared<const ModelSpec>(linear_model(p));
          }
        },
        model.params);
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

std::vector<Candidate> ExperimentConfig::build_candidates(Eigen::Index n) const {
  std::vector<Candidate> out;
  for (const auto& c : candidates) {
    auto expand = [&](const std::vector<double>& v, double fallback, const char* what) {
      if (v.empty()) return Vector::Constant(n, fallback).eval();
      if (v.size() == 1) return Vector::Constant(n, v.front()).eval();
      if (static_cast<Eigen::Index>(v.size()) != n) {
        throw ConfigError("candidate '" + c.label + "': " + what + " has " +
                          std::to_string(v.size()) + " entries, model has " + std::to_string(n) +
                          " states");
      }
      return Eigen::Map<const Vector>(v.data(), n).eval();
    };
    try {
      out.push_back(Candidate{c.label, make_scaling(expand(c.alpha, 1.0, "alpha"),
                                                    expand(c.kappa, 0.0, "kappa"), beta)});
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("candidate '" + c.label + "': " + e.what());
    }
  }
  return out;
}

SweepOptions ExperimentConfig::sweep_options(int workers) const {
  SweepOptions o;
  o.runs = runs;
  o.base_seed = base_seed;
  o.criterion = sweep ? sweep->criterion : Criterion::kTstdMean;
  o.transient_discard = transient_discard;
  o.workers = workers;
  o.jitter_relative = jitter_relative;
  return o;
}

static ExperimentConfig parse_config_impl(const json& doc) {
  check_keys(doc, {"model", "filter", "candidates", "mc", "sweep", "simulate", "output"}, "config");
  ExperimentConfig cfg;

  if (doc.contains("model")) {
    const json& m = doc["model"];
    check_keys(m, {"name", "params"}, "model");
    if (!m.contains("name") || !m["name"].is_string()) throw ConfigError("model.name: expected a string");
    cfg.model.name = m["name"].get<std::string>();
    const json params = m.contains("params") ? m["params"] : json::object();
    if (cfg.model.name == "sigmoid2d") {
      cfg.model.params = parse_sigmoid(params);
    } else if (cfg.model.name == "servo2d") {
      cfg.model.params = parse_servo(params);
    } else if (cfg.model.name == "linear") {
      cfg.model.params = parse_linear(params);
    } else {
      throw ConfigError("model.name: unknown model '" + cfg.model.name + "'");
    }
  }

  if (doc.contains("filter")) {
    const json& f = doc["filter"];
    check_keys(f, {"beta", "jitter_relative"}, "filter");
    if (f.contains("beta")) cfg.beta = get_real(f["beta"], "filter.beta");
    if (f.contains("jitter_relative")) {
      cfg.jitter_relative = get_real(f["jitter_relative"], "filter.jitter_relative");
      if (cfg.jitter_relative < 0.0) throw ConfigError("filter.jitter_relative: must be >= 0");
    }
  }

  if (doc.contains("candidates")) {
    const json& cs = doc["candidates"];
    if (!cs.is_array()) throw ConfigError("candidates: expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string w = "candidates[" + std::to_string(i) + "]";
      check_keys(cs[i], {"label", "alpha", "kappa"}, w);
      CandidateSpec c;
      c.label = cs[i].contains("label") ? cs[i]["label"].get<std::string>() : "candidate" + std::to_string(i);
      if (!cs[i].contains("alpha")) throw ConfigError(w + ": missing 'alpha'");
      c.alpha = get_reals(cs[i]["alpha"], w + ".alpha");
      if (c.alpha.empty()) throw ConfigError(w + ".alpha: must not be empty");
      if (cs[i].contains("kappa")) c.kappa = get_reals(cs[i]["kappa"], w + ".kappa");
      cfg.candidates.push_back(std::move(c));
    }
  }

  if (doc.contains("mc")) {
    const json& mc = doc["mc"];
    check_keys(mc, {"runs", "base_seed", "transient_discard"}, "mc");
    if (mc.contains("runs")) cfg.runs = get_int(mc["runs"], "mc.runs");
    if (mc.contains("base_seed")) {
      if (!mc["base_seed"].is_number_unsigned()) throw ConfigError("mc.base_seed: expected a non-negative integer");
      cfg.base_seed = mc["base_seed"].get<std::uint64_t>();
    }
    if (mc.contains("transient_discard")) {
      cfg.transient_discard = get_int(mc["transient_discard"], "mc.transient_discard");
    }
  }
  if (cfg.runs < 1) throw ConfigError("mc.runs: must be >= 1");

  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    check_keys(s, {"kind", "alpha", "alpha1", "alpha2", "kappa", "criterion"}, "sweep");
    SweepConfig sc;
    if (s.contains("kind")) sc.kind = s["kind"].get<std::string>();
    if (sc.kind == "1d") {
      if (!s.contains("alpha")) throw ConfigError("sweep: 1d sweep requires 'alpha'");
      if (s.contains("alpha1") || s.contains("alpha2")) throw ConfigError("sweep: 1d sweep takes only 'alpha'");
      sc.alpha = parse_grid(s["alpha"], "sweep.alpha");
    } else if (sc.kind == "2d") {
      if (!s.contains("alpha1") || !s.contains("alpha2")) {
        throw ConfigError("sweep: 2d sweep requires 'alpha1' and 'alpha2'");
      }
      if (s.contains("alpha")) throw ConfigError("sweep: 2d sweep takes 'alpha1'/'alpha2', not 'alpha'");
      sc.alpha1 = parse_grid(s["alpha1"], "sweep.alpha1");
      sc.alpha2 = parse_grid(s["alpha2"], "sweep.alpha2");
    } else {
      throw ConfigError("sweep.kind: expected '1d' or '2d'");
    }
    if (s.contains("kappa")) sc.kappa = get_real(s["kappa"], "sweep.kappa");
    if (s.contains("criterion")) {
      const auto c = parse_criterion(s["criterion"].get<std::string>());
      if (!c) throw ConfigError("sweep.criterion: expected tstd_mean, tstd_final or trmse");
      sc.criterion = *c;
    }
    cfg.sweep = sc;
  }

  if (doc.contains("simulate")) {
    const json& s = doc["simulate"];
    check_keys(s, {"candidate"}, "simulate");
    if (s.contains("candidate")) {
      const int idx = get_int(s["candidate"], "simulate.candidate");
      if (idx < 0) throw ConfigError("simulate.candidate: must be >= 0");
      cfg.simulate_candidate = static_cast<std::size_t>(idx);
    }
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    check_keys(o, {"dir", "write_errors"}, "output");
    if (o.contains("dir")) cfg.output_dir = o["dir"].get<std::string>();
    if (o.contains("write_errors")) cfg.write_errors = o["write_errors"].get<bool>();
  }

  // Cross-field validation against the built model.
  const auto model = cfg.build_model();
  if (cfg.transient_discard < 0 || cfg.transient_discard >= model->duration) {
    throw ConfigError("mc.transient_discard: must be in [0, duration)");
  }
  (void)cfg.build_candidates(model->state_dim);
  if (cfg.sweep && cfg.sweep->kind == "2d" && model->state_dim != 2) {
    throw ConfigError("sweep: 2d sweeps need a two-state model");
  }
  if (!cfg.candidates.empty() && cfg.simulate_candidate >= cfg.candidates.size()) {
    throw ConfigError("simulate.candidate: index out of range");
  }
  return cfg;
}

ExperimentConfig parse_config(const json& doc) {
  try {
    return parse_config_impl(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["model"] = {{"name", cfg.model.name}, {"params", params_json(cfg.model)}};
  doc["filter"] = {{"beta", cfg.beta}, {"jitter_relative", cfg.jitter_relative}};
  json cands = json::array();
  for (const auto& c : cfg.candidates) {
    json cj = {{"label", c.label}, {"alpha", c.alpha}};
    if (!c.kappa.empty()) cj["kappa"] = c.kappa;
    cands.push_back(std::move(cj));
  }
  doc["candidates"] = std::move(cands);
  doc["mc"] = {{"runs", cfg.runs},
               {"base_seed", cfg.base_seed},
               {"transient_discard", cfg.transient_discard}};
  if (cfg.sweep) {
    json s = {{"kind", cfg.sweep->kind},
              {"kappa", cfg.sweep->kappa},
              {"criterion", to_string(cfg.sweep->criterion)}};
    if (cfg.sweep->alpha) s["alpha"] = grid_json(*cfg.sweep->alpha);
    if (cfg.sweep->alpha1) s["alpha1"] = grid_json(*cfg.sweep->alpha1);
    if (cfg.sweep->alpha2) s["alpha2"] = grid_json(*cfg.sweep->alpha2);
    doc["sweep"] = std::move(s);
  }
  doc["simulate"] = {{"candidate", cfg.simulate_candidate}};
  doc["output"] = {{"dir", cfg.output_dir}, {"write_errors", cfg.write_errors}};
  return doc;
}

}  // namespace msukf::cli
