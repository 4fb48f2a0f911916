#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vlab/errors.hpp"
#include "vlab/young.hpp"

using namespace vlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> unit_marks(std::size_t n, double T = 1.0) { return uniform_grid(T, n); }

AnalyticGamma sine_gamma(std::vector<double> marks) {
  return AnalyticGamma(
      std::move(marks), 1, [](double s, double t, auto x, auto o) { o[0] = (t - s) * std::sin(x[0]); },
      [](double s, double t, auto x, auto o) { o[0] = (t - s) * std::cos(x[0]); });
}

double rk4_sine(double y, std::size_t n) {
  const double h = 1.0 / static_cast<double>(n);
  const auto f = [](double u) { return std::sin(u); };
  for (std::size_t i = 0; i < n; ++i) {
    const double k1 = f(y), k2 = f(y + h / 2 * k1), k3 = f(y + h / 2 * k2), k4 = f(y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("young") {
  TEST_CASE("sewing: increments independent of the path are summed exactly") {
    const auto marks = unit_marks(4096);
    AnalyticGamma g(marks, 1, [](double s, double t, auto, auto o) { o[0] = t - s; }, {});
    const auto r = sewing_integral(g, marks, {12});
    CHECK(r.exact);
    CHECK(r.level_totals.back() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.cumulative[2048] == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("sewing: integral of r dr and of 2 r cos r dr") {
    const auto marks = unit_marks(4096);
    AnalyticGamma lin(marks, 1, [](double s, double t, auto x, auto o) { o[0] = x[0] * (t - s); }, {});
    const auto r = sewing_integral(lin, marks, {12});
    CHECK(!r.exact);
    CHECK(r.rate == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::abs(r.level_totals.back() - 0.5) <= 2e-4);
    CHECK(std::abs(r.compensated[0] - 0.5) <= 1e-10);

    AnalyticGamma cs(marks, 1, [](double s, double t, auto x, auto o) { o[0] = std::cos(x[0]) * (t * t - s * s); }, {});
    const double exact = 2.0 * (std::sin(1.0) + std::cos(1.0) - 1.0);
    const auto q = sewing_integral(cs, marks, {12});
    CHECK(std::abs(q.compensated[0] - exact) <= 1e-8);
    CHECK(std::abs(q.compensated[0] - exact) < std::abs(q.level_totals.back() - exact));
  }

  TEST_CASE("sewing: growing level sums are rejected") {
    const auto marks = unit_marks(1024);
    AnalyticGamma g(marks, 1, [](double s, double t, auto, auto o) { o[0] = std::sqrt(t - s); }, {});
    CHECK_THROWS_AS(sewing_integral(g, marks), ConvergenceError);
    SewingOptions o;
    o.certify = false;
    CHECK(sewing_integral(g, marks, o).rate < 1.0);
  }

  TEST_CASE("sewing: depth beyond the dyadic structure is a grid error") {
    const auto marks = unit_marks(96);
    AnalyticGamma g(marks, 1, [](double s, double t, auto, auto o) { o[0] = t - s; }, {});
    CHECK_THROWS_AS(sewing_integral(g, marks, {6}), GridError);
  }

  TEST_CASE("lattice Gamma: zero drift and constant drift") {
    SamplePath p;
    p.times = uniform_grid(1.0, 512);
    p.values.resize(p.times.size());
    for (std::size_t i = 0; i < p.size(); ++i) p.values[i] = std::sin(7.0 * p.times[i]);
    const auto lat = FreqLattice::torus(1, 2 * kPi, 8);
    const auto zero = drift_constant(lat, 0.0);
    const auto G0 = build_gamma_from_drift(std::span<const SpectralDrift>(&zero, 1), p, {.m = 64});
    const auto one = drift_constant(lat, 2.5);
    const auto G1 = build_gamma_from_drift(std::span<const SpectralDrift>(&one, 1), p, {.m = 64});
    for (double x : {-3.0, -0.4, 0.0, 1.3, 2.9}) {
      const double xv[1] = {x};
      double o[1];
      G0.increment(10, 400, xv, o);
      CHECK(o[0] == 0.0);
      G1.increment(10, 400, xv, o);
      CHECK(o[0] == doctest::Approx(2.5 * (p.times[400] - p.times[10])).epsilon(1e-12));
    }
    CHECK(G0.report().pass);
  }

  TEST_CASE("lattice Gamma: cosine drift on a linear path") {
    SamplePath p;
    p.times = uniform_grid(1.0, 1024);
    p.values = p.times;
    const auto lat = FreqLattice::torus(1, 6 * kPi, 16);
    const auto b = drift_cosine(lat, 3);
    const auto G = build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), p, {.m = 256});
    double err = 0.0, jerr = 0.0;
    for (double x = -3.0; x < 3.0; x += 0.0137) {
      const double xv[1] = {x};
      double o[1], j[1];
      G.increment(100, 900, xv, o);
      G.jacobian(100, 900, xv, j);
      // the left-point time sum of cos(x + r) over the grid
      double sum = 0.0, dsum = 0.0;
      for (std::size_t r = 100; r < 900; ++r) {
        sum += std::cos(x + p.times[r]) / 1024.0;
        dsum -= std::sin(x + p.times[r]) / 1024.0;
      }
      err = std::max(err, std::abs(o[0] - sum));
      jerr = std::max(jerr, std::abs(j[0] - dsum));
    }
    CHECK(err <= 1e-5);
    CHECK(jerr <= 1e-3);
    CHECK(G.report().holder_c2 > 0.0);
  }

  TEST_CASE("lattice Gamma: regularity bound violation") {
    SamplePath p;
    p.times = uniform_grid(1.0, 256);
    p.values = p.times;
    const auto lat = FreqLattice::torus(1, 2 * kPi, 8);
    const auto b = drift_cosine(lat, 2);
    CHECK_THROWS_AS(build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), p, {.m = 64, .bound = 1e-3}),
                    RegularityError);
    CHECK_THROWS_AS(build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), p, {.m = 16}), LatticeError);
    CHECK_THROWS_AS(build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), p, {.m = 64, .stride = 3}), GridError);
  }

  TEST_CASE("Picard: zero drift converges at once") {
    const auto marks = unit_marks(256);
    AnalyticGamma g(marks, 2, [](double, double, auto, auto o) { o[0] = o[1] = 0.0; }, {});
    const double x0[2] = {0.3, -1.0};
    const auto sol = picard_solve(g, x0);
    CHECK(sol.iterations.front() == 1);
    CHECK(sol.theta.back() == -1.0);
    CHECK(sol.residual == 0.0);
  }

  TEST_CASE("Picard: smooth ODE matches RK4") {
    const auto g = sine_gamma(unit_marks(1000));
    const double x0[1] = {1.0};
    const auto sol = picard_solve(g, x0);
    CHECK(std::abs(sol.theta.back() - rk4_sine(1.0, 1000)) <= 1e-3);
    CHECK(fixed_point_residual(g, sol) <= 1e-7);
    for (double c : sol.contraction) CHECK(c <= 0.5);
  }

  TEST_CASE("Picard: fixed point equals the Euler scheme") {
    const auto g = sine_gamma(unit_marks(2000));
    const double x0[1] = {-2.0};
    PicardConfig cfg;
    cfg.tol = 1e-10;
    const auto p = picard_solve(g, x0, cfg);
    const auto e = euler_solve(g, x0);
    CHECK(max_gap(p.theta, e.theta) <= 10 * cfg.tol);
  }

  TEST_CASE("Picard: start value and window size do not change the solution") {
    const auto g = sine_gamma(unit_marks(1024));
    const double x0[1] = {0.5};
    PicardConfig a;
    a.tol = 1e-9;
    const auto base = picard_solve(g, x0, a);
    PicardConfig b = a;
    b.ramp = 0.7;
    CHECK(max_gap(base.theta, picard_solve(g, x0, b).theta) <= 2 * a.tol);
    PicardConfig c = a;
    c.window = 64;
    const auto w = picard_solve(g, x0, c);
    CHECK(w.window_starts.size() >= 16);
    CHECK(max_gap(base.theta, w.theta) <= 2 * a.tol);
  }

  TEST_CASE("Picard: a stiff field halves the window") {
    const auto marks = unit_marks(1024);
    AnalyticGamma g(marks, 1, [](double s, double t, auto x, auto o) { o[0] = -8.0 * (t - s) * x[0]; }, {});
    const double x0[1] = {1.0};
    const auto sol = picard_solve(g, x0);
    CHECK(sol.window_starts.size() > 1);
    for (double c : sol.contraction) CHECK(c <= 0.5);
    CHECK(sol.theta.back() == doctest::Approx(std::pow(1.0 - 8.0 / 1024, 1024)).epsilon(1e-6));
  }

  TEST_CASE("Picard: iteration cap raises a convergence error") {
    const auto g = sine_gamma(unit_marks(256));
    const double x0[1] = {1.0};
    PicardConfig cfg;
    cfg.max_iter = 2;
    CHECK_THROWS_AS(picard_solve(g, x0, cfg), ConvergenceError);
    cfg = {};
    cfg.tol = 0.0;
    CHECK_THROWS_AS(picard_solve(g, x0, cfg), ConfigError);
  }

  TEST_CASE("Picard on a Brownian path against a direct time quadrature") {
    const auto k = VolterraKernel::constant();
    const auto path = simulate_path(k, LevyModel::brownian(), uniform_grid(1.0, 2048), 4, 0);
    const auto lat = FreqLattice::torus(1, 8 * kPi, 24);
    const auto b = drift_sine(lat, 4);
    const auto G = build_gamma_from_drift(std::span<const SpectralDrift>(&b, 1), path, {.m = 512});
    const double x0[1] = {0.2};
    const auto sol = picard_solve(G, x0);
    // theta' = b(theta + z) by left-point Euler with exact evaluation of b
    double th = 0.2, gap = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      th += (path.times[i + 1] - path.times[i]) * std::sin(th + path.at(i));
      gap = std::max(gap, std::abs(th - sol.theta[i + 1]));
    }
    CHECK(gap <= 5e-3);
    const auto x = reconstruct(sol, path);
    CHECK(x.back() == doctest::Approx(sol.theta.back() + path.values.back()));
  }

  TEST_CASE("flow derivative: zero drift is the identity") {
    const auto marks = unit_marks(128);
    AnalyticGamma g(
        marks, 2, [](double, double, auto, auto o) { o[0] = o[1] = 0.0; },
        [](double, double, auto, auto o) { std::fill(o.begin(), o.end(), 0.0); });
    const double x0[2] = {1.0, 2.0};
    const auto fd = flow_derivative(g, picard_solve(g, x0));
    const double* J = fd.J.data() + 128 * 4;
    CHECK(J[0] == 1.0);
    CHECK(J[1] == 0.0);
    CHECK(J[2] == 0.0);
    CHECK(J[3] == 1.0);
  }

  TEST_CASE("flow derivative: linear field and finite differences") {
    const auto marks = unit_marks(1000);
    AnalyticGamma lin(
        marks, 1, [](double s, double t, auto x, auto o) { o[0] = 0.25 * x[0] * (t - s); },
        [](double s, double t, auto, auto o) { o[0] = 0.25 * (t - s); });
    const double x0[1] = {1.0};
    CHECK(std::abs(flow_derivative(lin, picard_solve(lin, x0)).J.back() - std::exp(0.25)) <= 1e-4);

    const auto g = sine_gamma(marks);
    PicardConfig cfg;
    cfg.tol = 1e-12;
    const auto J = flow_derivative(g, picard_solve(g, x0, cfg), cfg).J.back();
    const double h = 1e-4, a[1] = {1.0 + h}, b[1] = {1.0 - h};
    const double fd = (picard_solve(g, a, cfg).theta.back() - picard_solve(g, b, cfg).theta.back()) / (2 * h);
    CHECK(std::abs(J / fd - 1.0) <= 1e-3);
  }

  TEST_CASE("holder_norm examples") {
    const auto t = uniform_grid(1.0, 256);
    std::vector<double> c(t.size(), 3.0), id = t, sq(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) sq[i] = std::sqrt(t[i]);
    CHECK(holder_norm(t, c, 1, 0.5) == 0.0);
    CHECK(holder_norm(t, id, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(holder_norm(t, sq, 1, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(holder_norm(t, sq, 1, 1.5), DomainError);
  }
}
