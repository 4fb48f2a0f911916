#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vlab/cli/config.hpp"

namespace vlab::cli {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct Manifest {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  double wall_time = 0.0;
  std::vector<std::string> files;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<CriterionResult> criteria;

  bool all_pass() const;
};

void to_json(nlohmann::json& j, const Manifest& m);
void from_json(const nlohmann::json& j, Manifest& m);

Manifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const Manifest& m);

// Runs the pipeline for config.kind, writes its tables under config.out_dir
// and returns the manifest (also written as manifest.json).
Manifest run_experiment(const ExperimentConfig& config);

}  // namespace vlab::cli
