#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vlab/cli/experiment.hpp"
#include "vlab/drift.hpp"
#include "vlab/errors.hpp"
#include "vlab/lnd.hpp"
#include "vlab/parallel.hpp"
#include "vlab/regularity.hpp"
#include "vlab/young.hpp"

using namespace vlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1: characteristic function, 1e5 replicas per (kernel, model) pair

void characteristic_function(Outcome& out) {
  const std::vector<double> xi{0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  const std::vector<double> ts{0.25, 0.5, 0.75, 1.0};
  const std::size_t R = 100000, steps = 256, chunk = 5000;
  struct Pair {
    VolterraKernel k;
    LevyModel m;
    std::string name;
  };
  std::vector<Pair> pairs;
  for (double a : {2.0, 0.8, 1.5}) {
    const auto m = a == 2.0 ? LevyModel::brownian() : LevyModel::stable_iso(a);
    const std::string mn = a == 2.0 ? "brownian" : "stable" + fmt(a);
    pairs.push_back({VolterraKernel::constant(), m, "constant/" + mn});
    pairs.push_back({VolterraKernel::exponential(1.0), m, "exponential/" + mn});
    pairs.push_back({VolterraKernel::fractional_rl(0.4, a), m, "fractional_rl/" + mn});
  }
  const auto grid = uniform_grid(1.0, steps);
  std::vector<std::size_t> ti;
  for (double t : ts) ti.push_back(static_cast<std::size_t>(std::lround(t * steps)));
  const std::size_t cells = xi.size() * ts.size();
  std::size_t pooled = 0;
  for (const auto& p : pairs) {
    const auto t0 = std::chrono::steady_clock::now();
    PathSimulator sim(p.k, p.m, grid);
    std::vector<double> s1(cells, 0.0), s2(cells, 0.0);
    for (std::size_t c0 = 0; c0 < R; c0 += chunk) {
      const auto paths = [&] {
        std::vector<SamplePath> v(chunk);
#pragma omp parallel for schedule(dynamic, 64) num_threads(thread_count())
        for (std::size_t r = 0; r < chunk; ++r) v[r] = sim.simulate(1, c0 + r);
        return v;
      }();
      for (const auto& path : paths)
        for (std::size_t a = 0; a < ts.size(); ++a)
          for (std::size_t b = 0; b < xi.size(); ++b) {
            const double c = std::cos(xi[b] * path.at(ti[a]));
            s1[a * xi.size() + b] += c;
            s2[a * xi.size() + b] += c * c;
          }
    }
    double zmax = 0.0;
    std::size_t within2 = 0;
    for (std::size_t a = 0; a < ts.size(); ++a)
      for (std::size_t b = 0; b < xi.size(); ++b) {
        const double mean = s1[a * xi.size() + b] / R;
        const double var = s2[a * xi.size() + b] / R - mean * mean;
        const double se = std::sqrt(std::max(var, 0.0) / (R - 1));
        const double x[1] = {xi[b]};
        const double theory = char_function_theory(p.k, p.m, x, ts[a]).real();
        const double z = se > 0.0 ? (mean - theory) / se : (mean == theory ? 0.0 : 1e300);
        zmax = std::max(zmax, std::abs(z));
        within2 += std::abs(z) <= 2.0;
      }
    pooled += within2;
    const double frac = static_cast<double>(within2) / static_cast<double>(cells);
    const double secs = seconds_since(t0);
    out.require(zmax <= 3.0 && frac >= 0.95 && secs <= 300.0,
                p.name + " max|z|=" + fmt(zmax) + " frac<=2=" + fmt(frac) + " " + fmt(secs) + "s");
  }
  out.detail << "pooled frac<=2=" << fmt(static_cast<double>(pooled) / static_cast<double>(cells * pairs.size())) << "; ";
}

// ---- 2: fractional stable closed form against tanh-sinh on the raw integrand

void fractional_closed_form(Outcome& out) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double H = 0.1 + 0.8 * U(rng), a = 0.5 + 1.5 * U(rng), x = 0.1 + 4.9 * U(rng), t = 0.1 + 0.9 * U(rng);
    const double c = 1.0;
    const auto k = VolterraKernel::fractional_rl(H, a);
    const auto m = LevyModel::stable_iso(a, c);
    const double xv[1] = {x};
    const double closed = std::exp(-c * std::pow(x, a) * std::pow(t, H * a) / (H * a));
    const double theory = char_function_theory(k, m, xv, t).real();
    // ∫_0^t c |x|^a u^{Ha-1} du in the lag u = t - s
    const double integral =
        ts.integrate([&](double u) { return u > 0.0 ? c * std::pow(std::abs(x), a) * std::pow(u, (H - 1.0 / a) * a) : 0.0; },
                     0.0, t);
    const double quad = std::exp(-integral);
    worst = std::max({worst, std::abs(theory / closed - 1.0), std::abs(quad / closed - 1.0)});
  }
  out.require(worst <= 1e-8, "max relative error over 20 tuples = " + fmt(worst));
}

// ---- 3: LND table

void lnd_table(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = LndProbeConfig::standard(1, 1.0);
  const double zc = min_admissible_zeta(VolterraKernel::constant(), LevyModel::stable_iso(1.5), 1.5, cfg);
  out.require(std::abs(zc - 1.0) <= 1e-3, "constant " + fmt(zc));
  const double ze = min_admissible_zeta(VolterraKernel::exponential(1.0), LevyModel::brownian(), 2.0, cfg);
  out.require(std::abs(ze - 1.0) <= 1e-3, "exponential " + fmt(ze));
  for (double H : {0.25, 0.5, 0.75})
    for (double a : {1.2, 1.8}) {
      const double z = min_admissible_zeta(VolterraKernel::fractional_rl(H, a), LevyModel::stable_iso(a), a, cfg);
      out.require(std::abs(z - H * a) <= 1e-3, "fractional_rl(" + fmt(H) + "," + fmt(a) + ") " + fmt(z));
    }
  const auto c2 = LndProbeConfig::standard(1, 0.5);
  for (double lo : {0.5, 0.2, 0.05}) {
    const double z = min_admissible_zeta(VolterraKernel::log_singular(1.1, 1.0), LevyModel::stable_iso(1.0), 1.0, c2,
                                         1e-3, lo, 2.0);
    out.require(std::abs(z - lo) <= 1e-3, "log_singular from " + fmt(lo) + " -> " + fmt(z));
  }
  const double secs = seconds_since(t0);
  out.require(secs <= 120.0, fmt(secs) + "s");
}

// ---- 4-5: regularity ensembles

struct Ensembles {
  std::vector<SamplePath> brownian, frac_bm, stable[3];
  double seconds = 0.0;
};

std::vector<SamplePath> build(const VolterraKernel& k, const LevyModel& m, std::uint64_t seed, double& secs) {
  const auto t0 = std::chrono::steady_clock::now();
  PathSimulator sim(k, m, uniform_grid(1.0, 4096));
  auto e = simulate_ensemble(sim, seed, 500);
  secs = std::max(secs, seconds_since(t0));
  return e;
}

const FreqLattice kSpaceLattice{1, 0.5, 256};

void spatial_regularity(Outcome& out, const Ensembles& E) {
  const auto fit = [&](const std::vector<SamplePath>& e) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = estimate_spatial_regularity(e, 0.0, 1.0, kSpaceLattice);
    return std::pair{r, seconds_since(t0)};
  };
  const auto [b, tb] = fit(E.brownian);
  out.require(b.kappa_hat >= 0.35 && b.kappa_hat <= 0.65, "brownian kappa=" + fmt(b.kappa_hat));
  const auto [f, tf] = fit(E.frac_bm);
  out.require(f.kappa_hat >= 1.1 && f.kappa_hat <= 1.9, "fractional H=0.25 kappa=" + fmt(f.kappa_hat));
  const double Hs[3] = {0.25, 0.4, 0.6};
  SpatialRegularity st[3];
  double slow = std::max(tb, tf);
  for (int i = 0; i < 3; ++i) {
    const auto [r, tr] = fit(E.stable[i]);
    st[i] = r;
    slow = std::max(slow, tr);
    out.detail << "stable H=" << fmt(Hs[i]) << " kappa=" << fmt(r.kappa_hat) << " [" << fmt(r.ci_lo) << ","
               << fmt(r.ci_hi) << "]; ";
  }
  out.require(std::abs(st[1].kappa_hat - 0.75) <= 0.4, "stable H=0.4 within 0.4 of 0.75");
  out.require(st[0].ci_lo > st[1].ci_hi && st[1].ci_lo > st[2].ci_hi, "strictly decreasing in H beyond the bands");
  out.require(E.seconds + slow <= 900.0, "slowest ensemble " + fmt(E.seconds + slow) + "s");
}

std::vector<double> dyadic_lags() {
  std::vector<double> lags;
  for (std::size_t j = 16; j * 8 <= 4096; j *= 2) lags.push_back(static_cast<double>(j) / 4096.0);
  return lags;
}

void time_regularity(Outcome& out, const Ensembles& E) {
  const auto lags = dyadic_lags();
  const FreqLattice lat{1, 0.5, 128};
  const auto b = estimate_time_regularity(E.brownian, 0.25, lat, lags);
  out.require(b.ci_lo > 0.5, "brownian gamma=" + fmt(b.gamma_hat) + " lower=" + fmt(b.ci_lo));
  const auto s = estimate_time_regularity(E.stable[1], 0.25, lat, lags);
  out.require(s.ci_lo > 0.5, "stable H=0.4 gamma=" + fmt(s.gamma_hat) + " lower=" + fmt(s.ci_lo));
  SamplePath p;
  p.times = uniform_grid(1.0, 4096);
  p.values = p.times;
  std::vector<SamplePath> one{p};
  TimeFitOptions o;
  o.self_term = false;
  const auto l = estimate_time_regularity(one, 0.0, FreqLattice{1, 0.5, 8192}, lags, o);
  out.require(std::abs(l.gamma_hat - 0.5) <= 0.05, "linear path gamma=" + fmt(l.gamma_hat));
}

// ---- 6: moment envelope

void moment_envelope(Outcome& out, const Ensembles& E) {
  std::vector<double> xi, lags;
  for (int i = 0; i < 10; ++i) xi.push_back(std::pow(2.0, 0.5 * i));
  for (int j = 0; j < 8; ++j) lags.push_back(std::ldexp(8.0, j) / 4096.0);
  const auto b = mc_moment_bound_check(E.brownian, xi, lags);
  out.require(b.max_over_median <= 10.0, "brownian max/median=" + fmt(b.max_over_median));
  double secs = 0.0;
  const auto ou = build(VolterraKernel::exponential(1.0), LevyModel::stable_iso(1.5), 16, secs);
  const auto o = mc_moment_bound_check(ou, xi, lags);
  out.require(o.max_over_median <= 10.0, "OU stable 1.5 max/median=" + fmt(o.max_over_median));
}

// ---- 7: local time formula

void localtime_formula(Outcome& out) {
  const double P = 2.0 * kPi;
  const auto b = FourierSeries::cosine_mode(FreqLattice::torus(1, P, 2), 1);
  std::vector<double> shifts;
  for (int k = 0; k < 16; ++k) shifts.push_back(-0.5 * P + P * k / 16.0);
  const int R = 16;
  double worst = 0.0, ratio = 0.0;
  for (int r = 0; r < R; ++r) {
    const auto fine = simulate_path(VolterraKernel::constant(), LevyModel::brownian(), uniform_grid(1.0, 1 << 13), 7,
                                    static_cast<std::uint64_t>(r));
    SamplePath coarse;
    for (std::size_t i = 0; i < fine.size(); i += 2) {
      coarse.times.push_back(fine.times[i]);
      coarse.values.push_back(fine.values[i]);
    }
    const double e1 = localtime_formula_check(b, coarse, 0.0, 1.0, shifts, SpaceGrid::torus(1, P, 1 << 10)).max_error;
    const double e2 = localtime_formula_check(b, fine, 0.0, 1.0, shifts, SpaceGrid::torus(1, P, 1 << 11)).max_error;
    worst = std::max(worst, e1);
    ratio += e2 / e1 / R;
  }
  out.require(worst <= 5e-2, "max discrepancy at N=2^12 M=2^10 " + fmt(worst));
  out.require(ratio <= 0.55, "mean error ratio under halving " + fmt(ratio));
}

// ---- 8: sewing and Picard

AnalyticGamma sine_gamma(std::vector<double> marks) {
  return AnalyticGamma(
      std::move(marks), 1, [](double s, double t, auto x, auto o) { o[0] = (t - s) * std::sin(x[0]); },
      [](double s, double t, auto x, auto o) { o[0] = (t - s) * std::cos(x[0]); });
}

double rk4_sine(double y, std::size_t n) {
  const double h = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k1 = std::sin(y), k2 = std::sin(y + h / 2 * k1), k3 = std::sin(y + h / 2 * k2), k4 = std::sin(y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

void sewing_young(Outcome& out) {
  const auto marks = uniform_grid(1.0, 4096);
  const SewingOptions depth12{12};
  const auto certified = [](const SewingResult& r) { return r.exact || r.rate >= SewingOptions{}.min_rate; };
  AnalyticGamma g1(marks, 1, [](double s, double t, auto, auto o) { o[0] = t - s; }, {});
  const auto r1 = sewing_integral(g1, marks, depth12);
  out.require(certified(r1) && std::abs(r1.compensated[0] - 1.0) <= 1e-12, "int dr err " + fmt(r1.compensated[0] - 1.0));
  AnalyticGamma g2(marks, 1, [](double s, double t, auto x, auto o) { o[0] = x[0] * (t - s); }, {});
  const auto r2 = sewing_integral(g2, marks, depth12);
  out.require(certified(r2) && std::abs(r2.compensated[0] - 0.5) <= 1e-8,
              "int r dr err " + fmt(r2.compensated[0] - 0.5) + " rate " + fmt(r2.rate));
  AnalyticGamma g3(marks, 1, [](double s, double t, auto x, auto o) { o[0] = std::cos(x[0]) * (t * t - s * s); }, {});
  const auto r3 = sewing_integral(g3, marks, depth12);
  const double ex3 = 2.0 * (std::sin(1.0) + std::cos(1.0) - 1.0);
  out.require(certified(r3) && std::abs(r3.compensated[0] - ex3) <= 1e-8,
              "int cos(r) d(r^2) err " + fmt(r3.compensated[0] - ex3) + " rate " + fmt(r3.rate));

  const auto g = sine_gamma(uniform_grid(1.0, 1000));
  const double x0[1] = {1.0};
  PicardConfig cfg;
  const auto sol = picard_solve(g, x0, cfg);
  double err = std::abs(sol.theta.back() - rk4_sine(1.0, 1000));
  out.require(err <= 1e-3, "Picard vs RK4 " + fmt(err));
  PicardConfig ramp = cfg;
  ramp.ramp = 0.7;
  const auto alt = picard_solve(g, x0, ramp);
  double gap = 0.0;
  for (std::size_t i = 0; i < sol.theta.size(); ++i) gap = std::max(gap, std::abs(sol.theta[i] - alt.theta[i]));
  out.require(gap <= 2.0 * cfg.tol, "two starts differ by " + fmt(gap));
}

// ---- 9-10: regularized SDE

struct SdeRun {
  YoungSolution sol;
  GammaReport report;
  double residual = 0.0;
};

SdeRun solve_sde(const SpectralDrift& b, const SamplePath& path, std::size_t stride, const PicardConfig& cfg,
                 double xi0) {
  const auto G = build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), path, {.m = 512, .stride = stride});
  const double x0[1] = {xi0};
  SdeRun r;
  r.sol = picard_solve(G, x0, cfg);
  r.report = G.report();
  r.residual = fixed_point_residual(G, r.sol);
  return r;
}

void regularized_sde(Outcome& out) {
  const auto k = VolterraKernel::log_singular(1.1, 1.5, 0.5);
  const auto path = simulate_path(k, LevyModel::stable_iso(1.5), uniform_grid(0.5, 4096), 1, 0);
  const auto lat = FreqLattice::torus(1, 2 * kPi, 64);
  PicardConfig cfg;
  for (double beta : {-0.5, 0.0}) {
    const auto b = synth_besov_drift(beta, lat, 5);
    try {
      const auto fine = solve_sde(b, path, 1, cfg, 1.0);
      const auto coarse = solve_sde(b, path, 2, cfg, 1.0);
      double mc = 0.0;
      for (double c : fine.sol.contraction) mc = std::max(mc, c);
      for (double c : coarse.sol.contraction) mc = std::max(mc, c);
      double gap = 0.0;
      for (std::size_t i = 0; i < coarse.sol.theta.size(); ++i)
        gap = std::max(gap, std::abs(coarse.sol.theta[i] - fine.sol.theta[2 * i]));
      const std::string tag = "beta=" + fmt(beta) + " ";
      out.require(fine.report.pass && coarse.report.pass, tag + "C^gamma C^2 constant " + fmt(fine.report.holder_c2));
      out.require(mc <= 0.5, tag + "max contraction " + fmt(mc));
      out.require(fine.residual <= cfg.tol && coarse.residual <= cfg.tol,
                  tag + "residual " + fmt(std::max(fine.residual, coarse.residual)));
      out.require(gap <= 5.0 * cfg.tol, tag + "grid-halving change " + fmt(gap));
    } catch (const std::exception& e) {
      out.require(false, "beta=" + fmt(beta) + " " + e.what());
    }
  }
}

void flow(Outcome& out, const Ensembles& E) {
  PicardConfig cfg;
  cfg.tol = 1e-12;
  const double h = 1e-4;
  {
    const auto g = sine_gamma(uniform_grid(1.0, 1000));
    const double x0[1] = {1.0}, a[1] = {1.0 + h}, b[1] = {1.0 - h};
    const double J = flow_derivative(g, picard_solve(g, x0, cfg), cfg).J.back();
    const double fd = (picard_solve(g, a, cfg).theta.back() - picard_solve(g, b, cfg).theta.back()) / (2 * h);
    out.require(std::abs(J / fd - 1.0) <= 1e-2, "smooth benchmark rel " + fmt(std::abs(J / fd - 1.0)));
  }
  const auto kappa = estimate_spatial_regularity(E.frac_bm, 0.0, 1.0, kSpaceLattice).kappa_hat;
  const double beta = std::max(2.1 - kappa, 0.0);
  const auto b = synth_besov_drift(beta, FreqLattice::torus(1, 2 * kPi, 64), 5);
  const auto& path = E.frac_bm.front();
  const auto G = build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), path, {.m = 512});
  const double x0[1] = {1.0}, a[1] = {1.0 + h}, c[1] = {1.0 - h};
  const double J = flow_derivative(G, picard_solve(G, x0, cfg), cfg).J.back();
  const double fd = (picard_solve(G, a, cfg).theta.back() - picard_solve(G, c, cfg).theta.back()) / (2 * h);
  out.require(std::abs(J / fd - 1.0) <= 1e-2, "fractional H=0.25 path, beta=" + fmt(beta) + " (kappa=" + fmt(kappa) +
                                                  ") J=" + fmt(J) + " rel " + fmt(std::abs(J / fd - 1.0)));
}

}  // namespace

int main(int argc, char** argv) {
  cli::Manifest man;
  man.kind = "acceptance";
  man.seed = 1;
  const auto t0 = std::chrono::steady_clock::now();

  Ensembles E;
  E.brownian = build(VolterraKernel::constant(), LevyModel::brownian(), 11, E.seconds);
  E.frac_bm = build(VolterraKernel::fractional_rl(0.25, 2.0), LevyModel::brownian(), 12, E.seconds);
  const double Hs[3] = {0.25, 0.4, 0.6};
  for (int i = 0; i < 3; ++i)
    E.stable[i] = build(VolterraKernel::fractional_rl(Hs[i], 1.5), LevyModel::stable_iso(1.5), 13 + i, E.seconds);

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1.characteristic_function", characteristic_function},
      {"2.fractional_closed_form", fractional_closed_form},
      {"3.lnd_table", lnd_table},
      {"4.spatial_regularity", [&](Outcome& o) { spatial_regularity(o, E); }},
      {"5.time_regularity", [&](Outcome& o) { time_regularity(o, E); }},
      {"6.moment_envelope", [&](Outcome& o) { moment_envelope(o, E); }},
      {"7.localtime_formula", localtime_formula},
      {"8.sewing_young", sewing_young},
      {"9.regularized_sde", regularized_sde},
      {"10.flow_derivative", [&](Outcome& o) { flow(o, E); }},
  };
  bool all = true;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    const auto c0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), seconds_since(c0), o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.pass;
    man.criteria.push_back({id, o.pass, o.detail.str()});
  }
  man.wall_time = seconds_since(t0);
  if (argc > 1) cli::write_manifest(argv[1], man);
  return all ? 0 : 1;
}
