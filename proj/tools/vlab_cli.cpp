#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "vlab/cli/config.hpp"
#include "vlab/cli/experiment.hpp"
#include "vlab/cli/report.hpp"
#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> replicas;
  std::optional<int> threads;
};

int run_kind(const std::string& kind, const RunFlags& f) {
  vlab::cli::ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = vlab::cli::load_config(f.config);
    if (cfg.kind != kind)
      throw vlab::ConfigError("field 'kind': config is for '" + cfg.kind + "' but the subcommand is '" + kind + "'");
  } else {
    cfg.kind = kind;
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.replicas) cfg.replicas = *f.replicas;
  if (f.threads) vlab::set_thread_count(*f.threads);
  const auto man = vlab::cli::run_experiment(cfg);
  std::printf("%s: wrote %zu files to %s (%.2fs)\n", kind.c_str(), man.files.size(), cfg.out_dir.c_str(),
              man.wall_time);
  for (const auto& c : man.criteria) std::printf("  %s %s  %s\n", c.pass ? "PASS" : "FAIL", c.id.c_str(), c.detail.c_str());
  return man.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volterra-Levy local times and regularized SDE experiments"};
  app.set_version_flag("--version", std::string(vlab::cli::kVersion));
  app.require_subcommand(1);

  RunFlags flags;
  std::string selected;
  for (const auto& kind : vlab::cli::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "master seed override");
    sub->add_option("--out", flags.out, "output directory override");
    sub->add_option("--replicas", flags.replicas, "replica count override")->check(CLI::PositiveNumber);
    sub->add_option("--threads", flags.threads, "worker threads (default: VLAB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->callback([&selected, kind] { selected = kind; });
  }

  std::vector<std::string> manifests;
  auto* rep = app.add_subcommand("report", "aggregate manifests into a pass/fail table");
  rep->add_option("manifests", manifests, "manifest.json files")->required();
  rep->callback([&selected] { selected = "report"; });

  std::string dump_kind;
  auto* dump = app.add_subcommand("default-config", "print the default config for a kind");
  dump->add_option("kind", dump_kind, "experiment kind")->required()->check(CLI::IsMember(vlab::cli::experiment_kinds()));
  dump->callback([&selected] { selected = "default-config"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (selected == "report") {
      std::vector<vlab::cli::Manifest> ms;
      for (const auto& p : manifests) ms.push_back(vlab::cli::read_manifest(p));
      const auto table = vlab::cli::emit_report(ms);
      std::cout << table.format();
      const auto bad = table.failing();
      for (const auto& id : bad) std::cerr << "failing: " << id << "\n";
      return bad.empty() ? 0 : 1;
    }
    if (selected == "default-config") {
      vlab::cli::ExperimentConfig cfg;
      cfg.kind = dump_kind;
      std::cout << vlab::cli::serialize_config(cfg) << "\n";
      return 0;
    }
    return run_kind(selected, flags);
  } catch (const vlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const vlab::NotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
