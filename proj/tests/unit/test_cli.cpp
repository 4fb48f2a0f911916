#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vlab/cli/config.hpp"
#include "vlab/cli/csv.hpp"
#include "vlab/cli/experiment.hpp"
#include "vlab/cli/report.hpp"
#include "vlab/errors.hpp"

using namespace vlab;
using namespace vlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("vlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Manifest manifest(const std::string& kind, std::vector<CriterionResult> c) {
  Manifest m;
  m.kind = kind;
  m.criteria = std::move(c);
  return m;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config round-trips through JSON") {
    ExperimentConfig c;
    c.kind = "solve-sde";
    c.kernel.family = "log_singular";
    c.kernel.T_max = 0.5;
    c.kernel.alpha_ref = 1.5;
    c.model.family = "stable_iso";
    c.model.alpha = 1.5;
    c.T = 0.5;
    c.drift.beta = -0.25;
    c.xi = {0.1, 7.0};
    const auto back = parse_config(serialize_config(c));
    CHECK(serialize_config(back) == serialize_config(c));
    CHECK(config_hash(back) == config_hash(c));
    c.seed = 2;
    CHECK(config_hash(back) != config_hash(c));
  }

  TEST_CASE("config errors name the field") {
    CHECK_THROWS_AS(parse_config(R"({"kind":"simulate","stepz":10})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    ExperimentConfig c;
    c.steps = 0;
    try {
      c.validate();
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("steps") != std::string::npos);
    }
    c = {};
    c.kind = "nonsense";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.model.alpha = 2.5;
    c.model.family = "stable_iso";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("csv write and validated read") {
    const auto dir = scratch("csv");
    CsvTable t{"demo", {"a", "b"}, {}};
    t.add({1.0, 0.1});
    t.add({-2.5e-300, 3.0});
    write_csv((dir / "d.csv").string(), t);
    CHECK(slurp(dir / "d.csv").rfind("# vlab-csv v1 table=demo\na,b\n", 0) == 0);
    const auto r = read_csv((dir / "d.csv").string(), "demo", {"a", "b"});
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0][1] == 0.1);
    CHECK(r.rows[1][0] == -2.5e-300);
    CHECK_THROWS_AS(read_csv((dir / "d.csv").string(), "other", {"a", "b"}), ConfigError);
    CHECK_THROWS_AS(read_csv((dir / "d.csv").string(), "demo", {"a"}), ConfigError);
    CHECK_THROWS_AS(t.add({1.0}), ConfigError);
  }

  TEST_CASE("simulate is byte-identical across runs") {
    ExperimentConfig c;
    c.steps = 256;
    c.replicas = 20;
    c.svg = false;
    c.kernel.family = "fractional_rl";
    c.kernel.H = 0.3;
    const auto a = scratch("det_a"), b = scratch("det_b");
    c.out_dir = a.string();
    run_experiment(c);
    const auto first = slurp(a / "paths.csv"), moments = slurp(a / "moments.csv");
    c.out_dir = b.string();
    run_experiment(c);
    CHECK(!first.empty());
    CHECK(slurp(b / "paths.csv") == first);
    CHECK(slurp(b / "moments.csv") == moments);
  }

  TEST_CASE("verify-cf passes on a stable model") {
    ExperimentConfig c;
    c.kind = "verify-cf";
    c.model.family = "stable_iso";
    c.model.alpha = 1.5;
    c.kernel.family = "exponential";
    c.steps = 256;
    c.replicas = 4000;
    c.svg = false;
    c.out_dir = scratch("cf").string();
    const auto m = run_experiment(c);
    CHECK(m.metrics.at("max_abs_z").get<double>() <= 3.0);
    CHECK(m.all_pass());
    CHECK(read_manifest((fs::path(c.out_dir) / "manifest.json").string()).config_hash == config_hash(c));
  }

  TEST_CASE("regularity: Brownian confidence interval contains one half") {
    ExperimentConfig c;
    c.kind = "regularity";
    c.steps = 2048;
    c.replicas = 200;
    c.svg = false;
    c.out_dir = scratch("reg").string();
    const auto m = run_experiment(c);
    const auto ci = m.metrics.at("kappa_ci");
    CHECK(ci[0].get<double>() <= 0.5);
    CHECK(ci[1].get<double>() >= 0.5);
  }

  TEST_CASE("report aggregation") {
    CHECK(emit_report({manifest("simulate", {})}).rows.empty());
    CHECK_THROWS_AS(emit_report({}), NotFoundError);
    const auto ok = emit_report({manifest("a", {{"a.x", true, ""}}), manifest("b", {{"b.y", true, ""}})});
    CHECK(ok.all_pass());
    CHECK(ok.rows.size() == 2);
    const auto bad = emit_report({manifest("a", {{"a.x", true, ""}, {"a.z", false, "too big"}})});
    CHECK(!bad.all_pass());
    REQUIRE(bad.failing().size() == 1);
    CHECK(bad.failing()[0] == "a.z");
    CHECK(bad.format().find("a.z") != std::string::npos);
    const auto over = emit_report({manifest("a", {{"a.x", false, ""}}), manifest("a", {{"a.x", true, ""}})});
    CHECK(over.all_pass());
  }

  TEST_CASE("command line exit codes") {
    const auto dir = scratch("exit");
    CHECK(run_cli("default-config simulate") == 0);
    CHECK(run_cli("simulate --replicas 0") == 2);
    CHECK(run_cli("simulate --config /nonexistent.json") == 2);
    CHECK(run_cli("frobnicate") == 2);
    {
      std::ofstream bad(dir / "bad.json");
      bad << R"({"kind":"simulate","steps":-4})";
    }
    CHECK(run_cli("simulate --config " + (dir / "bad.json").string()) == 2);
    {
      std::ofstream good(dir / "good.json");
      good << R"({"kind":"simulate","steps":128,"replicas":8,"svg":false})";
    }
    CHECK(run_cli("simulate --config " + (dir / "good.json").string() + " --out " + (dir / "sim").string()) == 0);
    CHECK(fs::exists(dir / "sim" / "manifest.json"));
    CHECK(run_cli("report " + (dir / "sim" / "manifest.json").string()) == 0);
    write_manifest((dir / "fail.json").string(), manifest("x", {{"x.c", false, ""}}));
    CHECK(run_cli("report " + (dir / "fail.json").string()) == 1);
  }
}
