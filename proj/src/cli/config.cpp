#include "vlab/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "vlab/errors.hpp"

namespace vlab::cli {

using nlohmann::json;

namespace {

void field_error(const std::string& field, const std::string& msg) {
  throw ConfigError("field '" + field + "': " + msg);
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  if (!j.is_object()) field_error(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) field_error(prefix + k, "unknown key");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& prefix) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    field_error(prefix + key, "wrong type");
  }
}

json kernel_json(const KernelSpec& k) {
  return {{"family", k.family}, {"H", k.H}, {"alpha_ref", k.alpha_ref}, {"a", k.a}, {"p", k.p}, {"T_max", k.T_max}};
}

json model_json(const ModelSpec& m) {
  return {{"family", m.family}, {"sigma", m.sigma}, {"alpha", m.alpha}, {"c_alpha", m.c_alpha}, {"dim", m.dim}};
}

json drift_json(const DriftSpec& d) {
  return {{"kind", d.kind}, {"beta", d.beta},   {"K", d.K},         {"period", d.period},
          {"seed", d.seed}, {"mode", d.mode},   {"amplitude", d.amplitude}};
}

}  // namespace

VolterraKernel KernelSpec::build() const {
  if (family == "constant") return VolterraKernel::constant(T_max);
  if (family == "fractional_rl") return VolterraKernel::fractional_rl(H, alpha_ref, T_max);
  if (family == "exponential") return VolterraKernel::exponential(a, T_max);
  if (family == "log_singular") return VolterraKernel::log_singular(p, alpha_ref, T_max);
  field_error("kernel.family", "unknown family '" + family + "'");
  return {};
}

LevyModel ModelSpec::build() const {
  if (family == "brownian") return LevyModel::brownian(sigma, dim);
  if (family == "stable_iso") return LevyModel::stable_iso(alpha, c_alpha, dim);
  if (family == "stable_componentwise") return LevyModel::stable_componentwise(alpha, c_alpha, dim);
  if (family == "log_modified") return LevyModel::log_modified(alpha, dim);
  field_error("model.family", "unknown family '" + family + "'");
  return {};
}

FreqLattice DriftSpec::lattice(int dim) const { return FreqLattice::torus(dim, period, K); }

SpectralDrift DriftSpec::build(int dim) const {
  const auto lat = lattice(dim);
  if (kind == "besov") return synth_besov_drift(beta, lat, seed);
  if (kind == "cosine") return drift_cosine(lat, mode, amplitude);
  if (kind == "sine") return drift_sine(lat, mode, amplitude);
  if (kind == "constant") return drift_constant(lat, amplitude);
  if (kind == "zero") return drift_constant(lat, 0.0);
  field_error("drift.kind", "unknown kind '" + kind + "'");
  return {};
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"simulate", "verify-cf", "localtime", "regularity",
                                                 "lnd",      "solve-sde", "flow"};
  return kinds;
}

void ExperimentConfig::validate() const {
  bool known = false;
  for (const auto& k : experiment_kinds()) known |= k == kind;
  if (!known) field_error("kind", "unknown experiment kind '" + kind + "'");
  if (!(T > 0.0)) field_error("T", "must be positive");
  if (steps == 0) field_error("steps", "must be positive");
  if (space_points <= 0) field_error("space_points", "must be positive");
  if (freq_K <= 0) field_error("freq_K", "must be positive");
  if (freq_period < 0.0) field_error("freq_period", "must be non-negative");
  if (replicas == 0) field_error("replicas", "must be positive");
  if (!(tol > 0.0)) field_error("tol", "must be positive");
  if (kappa_time < 0.0) field_error("kappa_time", "must be non-negative");
  if (!(zeta_threshold > 0.0)) field_error("zeta_threshold", "must be positive");
  if (drift.K <= 0) field_error("drift.K", "must be positive");
  if (!(drift.period > 0.0)) field_error("drift.period", "must be positive");
  if (out_dir.empty()) field_error("out_dir", "must not be empty");
  if (T > kernel.T_max * (1.0 + 1e-12)) field_error("T", "exceeds kernel.T_max");
  try {
    kernel.build();
  } catch (const ConfigError& e) {
    field_error("kernel", e.what());
  }
  try {
    model.build();
  } catch (const ConfigError& e) {
    field_error("model", e.what());
  }
  if (kind == "verify-cf") {
    if (xi.empty()) field_error("xi", "verify-cf needs at least one frequency");
    if (times.empty()) field_error("times", "verify-cf needs at least one time");
    for (double t : times)
      if (!(t > 0.0 && t <= T)) field_error("times", "entries must lie in (0, T]");
  }
  if (kind == "solve-sde" || kind == "flow") {
    if (model.dim != 1) field_error("model.dim", "solve-sde and flow support dim 1");
    if (space_points <= 2 * drift.K) field_error("space_points", "must exceed 2 * drift.K");
    try {
      drift.build(model.dim);
    } catch (const std::exception& e) {
      field_error("drift", e.what());
    }
  }
  if (kind == "regularity" && replicas < 2) field_error("replicas", "regularity needs at least 2 replicas");
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"kind", c.kind},
           {"kernel", kernel_json(c.kernel)},
           {"model", model_json(c.model)},
           {"T", c.T},
           {"steps", c.steps},
           {"space_points", c.space_points},
           {"freq_K", c.freq_K},
           {"freq_period", c.freq_period},
           {"replicas", c.replicas},
           {"seed", c.seed},
           {"xi", c.xi},
           {"times", c.times},
           {"drift", drift_json(c.drift)},
           {"kappa_time", c.kappa_time},
           {"xi0", c.xi0},
           {"tol", c.tol},
           {"window", c.window},
           {"zeta_threshold", c.zeta_threshold},
           {"paths_written", c.paths_written},
           {"svg", c.svg},
           {"out_dir", c.out_dir}};
}

void from_json(const json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"kind", "kernel", "model", "T", "steps", "space_points", "freq_K", "freq_period", "replicas", "seed",
                  "xi", "times", "drift", "kappa_time", "xi0", "tol", "window", "zeta_threshold", "paths_written", "svg", "out_dir"},
                 "");
  read(j, "kind", c.kind, "");
  read(j, "T", c.T, "");
  read(j, "steps", c.steps, "");
  read(j, "space_points", c.space_points, "");
  read(j, "freq_K", c.freq_K, "");
  read(j, "freq_period", c.freq_period, "");
  read(j, "replicas", c.replicas, "");
  read(j, "seed", c.seed, "");
  read(j, "xi", c.xi, "");
  read(j, "times", c.times, "");
  read(j, "kappa_time", c.kappa_time, "");
  read(j, "xi0", c.xi0, "");
  read(j, "tol", c.tol, "");
  read(j, "window", c.window, "");
  read(j, "zeta_threshold", c.zeta_threshold, "");
  read(j, "paths_written", c.paths_written, "");
  read(j, "svg", c.svg, "");
  read(j, "out_dir", c.out_dir, "");
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    reject_unknown(k, {"family", "H", "alpha_ref", "a", "p", "T_max"}, "kernel.");
    read(k, "family", c.kernel.family, "kernel.");
    read(k, "H", c.kernel.H, "kernel.");
    read(k, "alpha_ref", c.kernel.alpha_ref, "kernel.");
    read(k, "a", c.kernel.a, "kernel.");
    read(k, "p", c.kernel.p, "kernel.");
    read(k, "T_max", c.kernel.T_max, "kernel.");
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"family", "sigma", "alpha", "c_alpha", "dim"}, "model.");
    read(m, "family", c.model.family, "model.");
    read(m, "sigma", c.model.sigma, "model.");
    read(m, "alpha", c.model.alpha, "model.");
    read(m, "c_alpha", c.model.c_alpha, "model.");
    read(m, "dim", c.model.dim, "model.");
  }
  if (j.contains("drift")) {
    const auto& d = j.at("drift");
    reject_unknown(d, {"kind", "beta", "K", "period", "seed", "mode", "amplitude"}, "drift.");
    read(d, "kind", c.drift.kind, "drift.");
    read(d, "beta", c.drift.beta, "drift.");
    read(d, "K", c.drift.K, "drift.");
    read(d, "period", c.drift.period, "drift.");
    read(d, "seed", c.drift.seed, "drift.");
    read(d, "mode", c.drift.mode, "drift.");
    read(d, "amplitude", c.drift.amplitude, "drift.");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) { return json(c).dump(2); }

std::string config_hash(const ExperimentConfig& c) {
  const std::string s = json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vlab::cli
