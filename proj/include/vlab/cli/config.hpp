#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlab/drift.hpp"
#include "vlab/kernels.hpp"
#include "vlab/levy.hpp"

namespace vlab::cli {

inline constexpr const char* kVersion = "0.3.0";

struct KernelSpec {
  std::string family = "constant";  // constant | fractional_rl | exponential | log_singular
  double H = 0.5;
  double alpha_ref = 2.0;
  double a = 1.0;
  double p = 1.1;
  double T_max = 1.0;

  VolterraKernel build() const;
};

struct ModelSpec {
  std::string family = "brownian";  // brownian | stable_iso | stable_componentwise | log_modified
  double sigma = 1.0;
  double alpha = 2.0;
  double c_alpha = 1.0;
  int dim = 1;

  LevyModel build() const;
};

struct DriftSpec {
  std::string kind = "besov";  // besov | cosine | sine | constant | zero
  double beta = 0.0;
  int K = 64;
  double period = 6.283185307179586;
  std::uint64_t seed = 5;
  int mode = 1;
  double amplitude = 1.0;

  FreqLattice lattice(int dim) const;
  SpectralDrift build(int dim) const;
};

struct ExperimentConfig {
  std::string kind = "simulate";  // simulate | verify-cf | localtime | regularity | lnd | solve-sde | flow
  KernelSpec kernel;
  ModelSpec model;
  double T = 1.0;
  std::size_t steps = 1024;
  int space_points = 1024;
  int freq_K = 256;
  double freq_period = 0.0;  // 0: dual of the time step scale, chosen per kind
  std::size_t replicas = 100;
  std::uint64_t seed = 1;
  std::vector<double> xi = {0.5, 1.0, 2.0};
  std::vector<double> times = {0.25, 0.5, 1.0};
  DriftSpec drift;
  double kappa_time = 0.25;  // Sobolev index for the time-regularity fit
  double xi0 = 1.0;
  double tol = 1e-8;
  std::size_t window = 0;
  double zeta_threshold = 1e-3;
  std::size_t paths_written = 4;
  bool svg = true;
  std::string out_dir = "out";

  // ConfigError naming the offending field
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

const std::vector<std::string>& experiment_kinds();

}  // namespace vlab::cli
