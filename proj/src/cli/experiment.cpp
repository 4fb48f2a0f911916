#include "vlab/cli/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vlab/cli/csv.hpp"
#include "vlab/cli/svg.hpp"
#include "vlab/errors.hpp"
#include "vlab/lnd.hpp"
#include "vlab/occupation.hpp"
#include "vlab/regularity.hpp"
#include "vlab/stats.hpp"
#include "vlab/young.hpp"

namespace vlab::cli {

using nlohmann::json;

bool Manifest::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

void to_json(json& j, const Manifest& m) {
  json crit = json::array();
  for (const auto& c : m.criteria) crit.push_back({{"id", c.id}, {"pass", c.pass}, {"detail", c.detail}});
  j = json{{"kind", m.kind},       {"config_hash", m.config_hash}, {"seed", m.seed},         {"version", m.version},
           {"wall_time", m.wall_time}, {"files", m.files},         {"metrics", m.metrics}, {"criteria", crit}};
}

void from_json(const json& j, Manifest& m) {
  try {
    m.kind = j.at("kind").get<std::string>();
    m.config_hash = j.value("config_hash", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.version = j.value("version", "");
    m.wall_time = j.value("wall_time", 0.0);
    m.files = j.value("files", std::vector<std::string>{});
    m.metrics = j.value("metrics", json::object());
    m.criteria.clear();
    for (const auto& c : j.value("criteria", json::array()))
      m.criteria.push_back({c.at("id").get<std::string>(), c.at("pass").get<bool>(), c.value("detail", "")});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("manifest '" + path + "' not found");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  return j.get<Manifest>();
}

void write_manifest(const std::string& path, const Manifest& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << json(m).dump(2) << "\n";
}

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  Manifest& man;

  void csv(const std::string& file, const CsvTable& t) {
    write_csv((dir / file).string(), t);
    man.files.push_back(file);
  }
  void svg(const std::string& file, const PlotSpec& p, const std::vector<Series>& s) {
    if (!cfg.svg) return;
    write_svg((dir / file).string(), p, s);
    man.files.push_back(file);
  }
  void criterion(const std::string& id, bool pass, const std::string& detail) {
    man.criteria.push_back({cfg.kind + "." + id, pass, detail});
  }
};

std::string str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<std::string> coord_columns(const char* stem, int d) {
  std::vector<std::string> c;
  for (int k = 1; k <= d; ++k) c.push_back(std::string(stem) + std::to_string(k));
  return c;
}

std::vector<SamplePath> ensemble(const ExperimentConfig& cfg) {
  PathSimulator sim(cfg.kernel.build(), cfg.model.build(), uniform_grid(cfg.T, cfg.steps));
  return simulate_ensemble(sim, cfg.seed, cfg.replicas);
}

SamplePath single_path(const ExperimentConfig& cfg) {
  return simulate_path(cfg.kernel.build(), cfg.model.build(), uniform_grid(cfg.T, cfg.steps), cfg.seed, 0);
}

void run_simulate(Context& cx) {
  const auto& cfg = cx.cfg;
  const auto paths = ensemble(cfg);
  const int d = cfg.model.dim;
  CsvTable pt{"paths", {"replica", "t"}, {}};
  for (auto& c : coord_columns("z", d)) pt.columns.push_back(c);
  std::vector<Series> plot;
  for (std::size_t r = 0; r < std::min(cfg.paths_written, paths.size()); ++r) {
    Series s{"replica " + std::to_string(r), {}, {}};
    for (std::size_t i = 0; i < paths[r].size(); ++i) {
      std::vector<double> row{static_cast<double>(r), paths[r].times[i]};
      for (int k = 0; k < d; ++k) row.push_back(paths[r].at(i, k));
      pt.add(std::move(row));
      s.x.push_back(paths[r].times[i]);
      s.y.push_back(paths[r].at(i, 0));
    }
    plot.push_back(std::move(s));
  }
  cx.csv("paths.csv", pt);
  CsvTable mt{"moments", {"t", "mean_z1", "var_z1"}, {}};
  for (std::size_t i = 0; i < paths.front().size(); ++i) {
    Welford w;
    for (const auto& p : paths) w.push(p.at(i, 0));
    mt.add({paths.front().times[i], w.mean, w.variance()});
  }
  cx.csv("moments.csv", mt);
  cx.svg("paths.svg", {"sample paths", "t", "z_1"}, plot);
  cx.man.metrics["replicas"] = paths.size();
  cx.man.metrics["var_z1_T"] = mt.rows.back()[2];
}

void run_verify_cf(Context& cx) {
  const auto& cfg = cx.cfg;
  const auto kernel = cfg.kernel.build();
  const auto model = cfg.model.build();
  const auto paths = ensemble(cfg);
  CsvTable t{"verify_cf", {"xi", "t", "mc_re", "mc_im", "stderr", "theory_re", "z_score"}, {}};
  std::vector<Series> plot;
  std::size_t within2 = 0;
  double zmax = 0.0;
  for (double tt : cfg.times) {
    Series mc{"mc t=" + str(tt), {}, {}, true}, th{"theory t=" + str(tt), {}, {}};
    for (double x : cfg.xi) {
      std::vector<double> xi(static_cast<std::size_t>(model.dim), 0.0);
      xi[0] = x;
      const auto est = char_function_mc(paths, xi, tt);
      const double theory = char_function_theory(kernel, model, xi, tt).real();
      const double diff = est.value.real() - theory;
      const double z = est.se_re > 0.0 ? diff / est.se_re : (diff == 0.0 ? 0.0 : std::copysign(1e300, diff));
      t.add({x, tt, est.value.real(), est.value.imag(), est.se_re, theory, z});
      zmax = std::max(zmax, std::abs(z));
      within2 += std::abs(z) <= 2.0;
      mc.x.push_back(x);
      mc.y.push_back(est.value.real());
      th.x.push_back(x);
      th.y.push_back(theory);
    }
    plot.push_back(std::move(mc));
    plot.push_back(std::move(th));
  }
  cx.csv("verify_cf.csv", t);
  cx.svg("verify_cf.svg", {"characteristic function", "xi", "Re E exp(i xi z_t)"}, plot);
  const double frac2 = static_cast<double>(within2) / static_cast<double>(t.rows.size());
  cx.man.metrics["max_abs_z"] = zmax;
  cx.man.metrics["fraction_within_2"] = frac2;
  cx.criterion("z3", zmax <= 3.0, "max |z| = " + str(zmax));
  cx.criterion("z2", frac2 >= 0.95, "fraction |z| <= 2 = " + str(frac2));
}

void run_localtime(Context& cx) {
  const auto& cfg = cx.cfg;
  const auto path = single_path(cfg);
  const int d = path.dim;
  double lo = 0.0, hi = 0.0;
  for (double v : path.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double pad = 0.05 * (hi - lo) + 1e-9;
  const auto grid = SpaceGrid::box(d, lo - pad, hi + pad, cfg.space_points);
  const auto L = occupation_histogram(path, 0.0, cfg.T, grid);
  const double period = cfg.freq_period > 0.0 ? cfg.freq_period : 4.0 * grid.width();
  const auto lat = FreqLattice::torus(d, period, cfg.freq_K);
  const double max_xi = std::min(lat.cutoff(), 0.25 * kPi / grid.dx);
  const double agreement = localtime_route_agreement(path, 0.0, cfg.T, grid, lat, max_xi);

  const auto b = cfg.drift.build(d);
  const auto torus = SpaceGrid::torus(d, cfg.drift.period, cfg.space_points);
  std::vector<double> shifts;
  for (int k = 0; k < 16; ++k) shifts.push_back(-0.5 * cfg.drift.period + cfg.drift.period * k / 16.0);
  const auto formula = localtime_formula_check(b.series, path, 0.0, cfg.T, shifts, torus);

  if (d == 1) {
    CsvTable lt{"localtime", {"x", "density"}, {}};
    Series s{"L_{0,T}", {}, {}};
    const auto row = L.row(L.marks.size() - 1);
    for (int i = 0; i < grid.cells; ++i) {
      lt.add({grid.center(i), row[static_cast<std::size_t>(i)]});
      s.x.push_back(grid.center(i));
      s.y.push_back(row[static_cast<std::size_t>(i)]);
    }
    cx.csv("localtime.csv", lt);
    cx.svg("localtime.svg", {"occupation density", "x", "L(x)"}, {s});
  }
  CsvTable ft{"localtime_formula", {"y", "time_sum", "spectral"}, {}};
  for (std::size_t k = 0; k < shifts.size(); ++k) ft.add({shifts[k], formula.lhs[k], formula.rhs[k]});
  cx.csv("localtime_formula.csv", ft);
  CsvTable st{"localtime_summary", {"route_agreement", "formula_max_error", "mass", "clipped_mass"}, {}};
  st.add({agreement, formula.max_error, L.mass(L.marks.size() - 1), L.clipped_mass});
  cx.csv("summary.csv", st);
  cx.man.metrics["route_agreement"] = agreement;
  cx.man.metrics["formula_max_error"] = formula.max_error;
  cx.criterion("formula", formula.max_error <= 5e-2, "max discrepancy = " + str(formula.max_error));
}

void run_regularity(Context& cx) {
  const auto& cfg = cx.cfg;
  const auto paths = ensemble(cfg);
  const int d = cfg.model.dim;
  const double dxi = cfg.freq_period > 0.0 ? 2.0 * kPi / cfg.freq_period : 0.5;
  const FreqLattice lat{d, dxi, cfg.freq_K};
  SpatialFitOptions so;
  so.min_replicas = std::min<std::size_t>(so.min_replicas, cfg.replicas);
  const auto sr = estimate_spatial_regularity(paths, 0.0, cfg.T, lat, so);
  std::vector<double> lags;
  for (std::size_t j = 16; j * 8 <= cfg.steps; j *= 2) lags.push_back(cfg.T * static_cast<double>(j) / cfg.steps);
  if (lags.size() < 3) throw ConfigError("field 'steps': regularity needs steps >= 512 for the time fit");
  const FreqLattice tlat{d, dxi, std::max(1, cfg.freq_K / 2)};
  const auto tr = estimate_time_regularity(paths, cfg.kappa_time, tlat, lags);

  CsvTable t{"regularity",
             {"kappa_hat", "ci_lo", "ci_hi", "gamma_hat", "gamma_ci_lo", "gamma_ci_hi", "lambda_hat", "r2_space",
              "r2_time", "cutoff"},
             {}};
  t.add({sr.kappa_hat, sr.ci_lo, sr.ci_hi, tr.gamma_hat, tr.ci_lo, tr.ci_hi, sr.lambda_hat, sr.r2, tr.r2, sr.cutoff});
  cx.csv("regularity.csv", t);
  CsvTable sp{"spectrum", {"xi", "moment"}, {}};
  for (std::size_t i = 0; i < sr.xi.size(); ++i) sp.add({sr.xi[i], sr.moment[i]});
  cx.csv("spectrum.csv", sp);
  CsvTable tm{"time_norms", {"lag", "norm"}, {}};
  for (std::size_t i = 0; i < tr.lags.size(); ++i) tm.add({tr.lags[i], tr.norms[i]});
  cx.csv("time_norms.csv", tm);
  cx.svg("spectrum.svg", {"radial moment of the occupation transform", "|xi|", "E|mu|^2 ^(1/2)", true, true},
         {{"kappa_hat=" + str(sr.kappa_hat), sr.xi, sr.moment, true}});
  cx.svg("time_norms.svg", {"time increments", "lag", "norm", true, true},
         {{"gamma_hat=" + str(tr.gamma_hat), tr.lags, tr.norms, true}});
  cx.man.metrics["kappa_hat"] = sr.kappa_hat;
  cx.man.metrics["kappa_ci"] = {sr.ci_lo, sr.ci_hi};
  cx.man.metrics["gamma_hat"] = tr.gamma_hat;
  cx.man.metrics["gamma_ci"] = {tr.ci_lo, tr.ci_hi};
}

void run_lnd(Context& cx) {
  const auto& cfg = cx.cfg;
  const auto kernel = cfg.kernel.build();
  const auto model = cfg.model.build();
  auto probe = LndProbeConfig::standard(model.dim, cfg.T);
  probe.alpha = model.index();
  const double zmin = min_admissible_zeta(kernel, model, probe.alpha, probe, cfg.zeta_threshold);
  CsvTable t{"lnd", {"zeta", "infimum", "t", "s", "radius", "decay_slope", "admissible"}, {}};
  for (double z : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2}) {
    probe.zeta = z;
    const auto inf = lnd_infimum(kernel, model, probe);
    const bool ok = inf.value >= cfg.zeta_threshold && inf.decay_slope <= probe.slope_tol;
    t.add({z, inf.value, inf.t, inf.s, inf.radius, inf.decay_slope, ok ? 1.0 : 0.0});
  }
  cx.csv("lnd.csv", t);
  CsvTable s{"lnd_summary", {"min_admissible_zeta"}, {}};
  s.add({zmin});
  cx.csv("summary.csv", s);
  cx.man.metrics["min_admissible_zeta"] = zmin;
}

struct SdeRun {
  SamplePath path;
  LatticeGamma gamma;
  YoungSolution sol;
  PicardConfig pc;
};

SdeRun solve(const ExperimentConfig& cfg) {
  auto path = single_path(cfg);
  const auto b = cfg.drift.build(1);
  GammaBuildOptions go;
  go.m = cfg.space_points;
  auto G = build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), path, go);
  PicardConfig pc;
  pc.tol = cfg.tol;
  pc.window = cfg.window;
  const double x0[1] = {cfg.xi0};
  auto sol = picard_solve(G, x0, pc);
  return {std::move(path), std::move(G), std::move(sol), pc};
}

void sde_summary(Context& cx, const SdeRun& r) {
  double mc = 0.0;
  for (double c : r.sol.contraction) mc = std::max(mc, c);
  const double hn = holder_norm(r.sol.times, r.sol.theta, 1, 0.5);
  const auto& rep = r.gamma.report();
  CsvTable s{"sde_summary", {"residual", "windows", "max_contraction", "holder_theta", "gamma_c0", "gamma_c1",
                             "gamma_c2", "gamma_holder_c2"}, {}};
  s.add({r.sol.residual, static_cast<double>(r.sol.window_starts.size()), mc, hn, rep.c0, rep.c1, rep.c2,
         rep.holder_c2});
  cx.csv("summary.csv", s);
  cx.man.metrics["residual"] = r.sol.residual;
  cx.man.metrics["max_contraction"] = mc;
  cx.man.metrics["holder_theta"] = hn;
  cx.man.metrics["gamma_holder_c2"] = rep.holder_c2;
  cx.criterion("residual", r.sol.residual <= cx.cfg.tol, "fixed-point residual = " + str(r.sol.residual));
  cx.criterion("contraction", mc <= 0.5, "max contraction = " + str(mc));
}

void run_solve_sde(Context& cx) {
  const auto r = solve(cx.cfg);
  const auto x = reconstruct(r.sol, r.path);
  CsvTable t{"solution", {"t", "theta", "x", "z"}, {}};
  Series st{"theta", {}, {}}, sx{"x", {}, {}};
  for (std::size_t i = 0; i < r.sol.times.size(); ++i) {
    t.add({r.sol.times[i], r.sol.theta[i], x[i], x[i] - r.sol.theta[i]});
    st.x.push_back(r.sol.times[i]);
    st.y.push_back(r.sol.theta[i]);
    sx.x.push_back(r.sol.times[i]);
    sx.y.push_back(x[i]);
  }
  cx.csv("solution.csv", t);
  cx.svg("solution.svg", {"regularized SDE", "t", "value"}, {st, sx});
  sde_summary(cx, r);
}

void run_flow(Context& cx) {
  const auto& cfg = cx.cfg;
  const auto r = solve(cfg);
  const auto fd = flow_derivative(r.gamma, r.sol, r.pc);
  const double h = 1e-4;
  const double up[1] = {cfg.xi0 + h}, dn[1] = {cfg.xi0 - h};
  const auto su = picard_solve(r.gamma, up, r.pc);
  const auto sd = picard_solve(r.gamma, dn, r.pc);
  CsvTable t{"flow", {"t", "jacobian", "finite_difference"}, {}};
  Series sj{"flow derivative", {}, {}}, sf{"finite difference", {}, {}, true};
  for (std::size_t i = 0; i < r.sol.times.size(); ++i) {
    const double f = (su.theta[i] - sd.theta[i]) / (2.0 * h);
    t.add({r.sol.times[i], fd.J[i], f});
    sj.x.push_back(r.sol.times[i]);
    sj.y.push_back(fd.J[i]);
    sf.x.push_back(r.sol.times[i]);
    sf.y.push_back(f);
  }
  cx.csv("flow.csv", t);
  cx.svg("flow.svg", {"flow derivative", "t", "dy/dxi"}, {sj, sf});
  sde_summary(cx, r);
  const double fT = t.rows.back()[2];
  const double rel = std::abs(t.rows.back()[1] - fT) / std::max(std::abs(fT), 1e-300);
  cx.man.metrics["flow_fd_rel_error"] = rel;
  cx.criterion("finite_difference", rel <= 1e-2, "relative gap at T = " + str(rel));
}

}  // namespace

Manifest run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Manifest man;
  man.kind = config.kind;
  man.config_hash = config_hash(config);
  man.seed = config.seed;
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("field 'out_dir': cannot create '" + config.out_dir + "': " + ec.message());
  {
    std::ofstream cf(dir / "config.json");
    cf << serialize_config(config) << "\n";
    man.files.push_back("config.json");
  }
  Context cx{config, dir, man};
  try {
    if (config.kind == "simulate") run_simulate(cx);
    else if (config.kind == "verify-cf") run_verify_cf(cx);
    else if (config.kind == "localtime") run_localtime(cx);
    else if (config.kind == "regularity") run_regularity(cx);
    else if (config.kind == "lnd") run_lnd(cx);
    else if (config.kind == "solve-sde") run_solve_sde(cx);
    else if (config.kind == "flow") run_flow(cx);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::logic_error& e) {
    throw ConfigError("experiment '" + config.kind + "': " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("experiment '" + config.kind + "' failed: " + e.what());
  }
  man.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  man.files.push_back("manifest.json");
  write_manifest((dir / "manifest.json").string(), man);
  return man;
}

}  // namespace vlab::cli
