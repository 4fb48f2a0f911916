#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "vlab/drift.hpp"
#include "vlab/errors.hpp"

using namespace vlab;

namespace {

constexpr double kPi = std::numbers::pi;

SamplePath random_walk(Gen& g, int dim, std::size_t steps, double scale) {
  SamplePath p;
  p.times = uniform_grid(1.0, steps);
  p.dim = dim;
  p.values.assign((steps + 1) * static_cast<std::size_t>(dim), 0.0);
  for (std::size_t i = 1; i <= steps; ++i)
    for (int c = 0; c < dim; ++c)
      p.values[i * dim + c] = p.values[(i - 1) * dim + c] + g.uniform(-scale, scale);
  return p;
}

double coeff_l1(const FourierSeries& b) {
  double s = 0.0;
  for (auto c : b.coeffs) s += std::abs(c);
  return s;
}

}  // namespace

TEST_SUITE("drift") {
  TEST_CASE("smooth synthetic drift: Lipschitz norm is controlled by the sup norm") {
    const auto lat = FreqLattice::torus(1, 2 * kPi, 32);
    const auto b = synth_besov_drift(10.0, lat, 3);
    double res = 1.0;
    const auto f = drift_field(b, 256, &res);
    double sup = 0.0;
    for (double v : f.values) sup = std::max(sup, std::abs(v));
    CHECK(res < 1e-12);
    CHECK(holder_spatial_norm(f, 1.0) <= 10.0 * sup);
  }

  TEST_CASE("synthetic drift: realized norm equals the target and is stable under refinement") {
    for_all(6, 51, [](Gen& g) {
      const double beta = g.uniform(-1.0, 1.0);
      const auto seed = static_cast<std::uint64_t>(g.integer(1, 1000));
      const auto a = synth_besov_drift(beta, FreqLattice::torus(1, 2 * kPi, 64), seed);
      const auto b = synth_besov_drift(beta, FreqLattice::torus(1, 2 * kPi, 128), seed);
      CHECK(drift_sobolev_norm(a.series, beta) == doctest::Approx(a.target_norm).epsilon(1e-12));
      CHECK(drift_sobolev_norm(b.series, beta) / drift_sobolev_norm(a.series, beta) == doctest::Approx(1.0).epsilon(0.1));
      const double ga = drift_sobolev_norm(a.series, beta + 0.5);
      const double gb = drift_sobolev_norm(b.series, beta + 0.5);
      CHECK(gb / ga > 1.1);
    });
  }

  TEST_CASE("synthetic drift is real and Hermitian in 2-d") {
    const auto lat = FreqLattice::torus(2, 2 * kPi, 6);
    const auto b = synth_besov_drift(0.5, lat, 9);
    double res = 1.0;
    drift_field(b, 16, &res);
    CHECK(res < 1e-12);
  }

  TEST_CASE("spectral convolution equals the time sum of the shifted drift") {
    for_all(5, 52, [](Gen& g) {
      const int dim = g.coin() ? 1 : 2;
      const auto lat = FreqLattice::torus(dim, 2 * kPi, 3);
      const auto b = synth_besov_drift(g.uniform(-0.5, 1.0), lat, static_cast<std::uint64_t>(g.integer(1, 99)));
      const auto p = random_walk(g, dim, 200, 0.3);
      const auto mu = occupation_fourier(p, 0.0, 1.0, lat, OccupationMethod::Direct);
      const int m = 8;
      const auto F = convolve_spectral(b, mu, m);
      const std::size_t npts = dim == 1 ? 8 : 64;
      for (std::size_t q = 0; q < npts; ++q) {
        double y[2] = {F.lo + F.dx() * static_cast<double>(dim == 1 ? q : q / 8), F.lo + F.dx() * static_cast<double>(q % 8)};
        double acc = 0.0;
        for (std::size_t r = 0; r + 1 < p.size(); ++r) {
          double x[2];
          for (int c = 0; c < dim; ++c) x[c] = y[c] + p.at(r, c);
          acc += (p.times[r + 1] - p.times[r]) * b.series.eval(std::span<const double>(x, static_cast<std::size_t>(dim)));
        }
        CHECK(F.values[q] == doctest::Approx(acc).epsilon(1e-10));
      }
    });
  }

  TEST_CASE("histogram convolution equals brute-force cell sums on an 8x8 torus") {
    Gen g(53);
    const auto lat = FreqLattice::torus(2, 2 * kPi, 3);
    const auto b = synth_besov_drift(0.0, lat, 4);
    const auto p = random_walk(g, 2, 300, 0.4);
    const auto grid = SpaceGrid::torus(2, 2 * kPi, 8);
    const auto L = occupation_histogram(p, 0.0, 1.0, grid);
    const auto F = convolve_spectral(b, L, 0, 8);
    for (int iy = 0; iy < 8; ++iy)
      for (int jy = 0; jy < 8; ++jy) {
        const double y[2] = {F.lo + F.dx() * iy, F.lo + F.dx() * jy};
        double acc = 0.0;
        for (int ic = 0; ic < 8; ++ic)
          for (int jc = 0; jc < 8; ++jc) {
            const double x[2] = {y[0] + grid.center(ic), y[1] + grid.center(jc)};
            acc += b.series.eval(x) * L.density[static_cast<std::size_t>(ic * 8 + jc)] * grid.cell_volume();
          }
        CHECK(F.values[static_cast<std::size_t>(iy * 8 + jy)] == doctest::Approx(acc).epsilon(1e-10));
      }
  }

  TEST_CASE("constant drift gives c (t - s) everywhere") {
    const auto lat = FreqLattice::torus(1, 2 * kPi, 8);
    Gen g(54);
    const auto p = random_walk(g, 1, 256, 0.2);
    const auto mu = occupation_fourier(p, 0.25, 0.75, lat);
    const auto F = convolve_spectral(drift_constant(lat, -1.7), mu, 32);
    for (double v : F.values) CHECK(v == doctest::Approx(-1.7 * 0.5).epsilon(1e-12));
  }

  TEST_CASE("convolution is bilinear") {
    Gen g(55);
    const auto lat = FreqLattice::torus(1, 2 * kPi, 8);
    const auto b1 = synth_besov_drift(0.2, lat, 1), b2 = synth_besov_drift(-0.3, lat, 2);
    SpectralDrift sum = b1;
    for (std::size_t i = 0; i < sum.series.coeffs.size(); ++i) sum.series.coeffs[i] = 2.0 * b1.series.coeffs[i] - b2.series.coeffs[i];
    const auto p = random_walk(g, 1, 128, 0.3);
    const auto mu1 = occupation_fourier(p, 0.0, 0.5, lat), mu2 = occupation_fourier(p, 0.5, 1.0, lat);
    SpectralField mu = mu1;
    for (std::size_t i = 0; i < mu.values.size(); ++i) mu.values[i] += mu2.values[i];
    const auto F = convolve_spectral(sum, mu, 32);
    const auto A1 = convolve_spectral(b1, mu1, 32), A2 = convolve_spectral(b1, mu2, 32);
    const auto B1 = convolve_spectral(b2, mu1, 32), B2 = convolve_spectral(b2, mu2, 32);
    for (std::size_t i = 0; i < F.values.size(); ++i)
      CHECK(F.values[i] == doctest::Approx(2.0 * (A1.values[i] + A2.values[i]) - B1.values[i] - B2.values[i]).epsilon(1e-10));
  }

  TEST_CASE("convolution is bounded by the drift sup times the elapsed time") {
    for_all(10, 56, [](Gen& g) {
      const auto lat = FreqLattice::torus(1, 2 * kPi, 16);
      const auto b = synth_besov_drift(g.uniform(-1.0, 2.0), lat, static_cast<std::uint64_t>(g.integer(1, 500)));
      const auto p = random_walk(g, 1, 256, g.uniform(0.01, 1.0));
      const auto i0 = static_cast<std::size_t>(g.integer(0, 128)), i1 = static_cast<std::size_t>(g.integer(129, 256));
      const auto mu = occupation_fourier(p, p.times[i0], p.times[i1], lat);
      const auto F = convolve_spectral(b, mu, 64);
      const double elapsed = mu.values[lat.zero_index()].real();
      for (double v : F.values) CHECK(std::abs(v) <= coeff_l1(b.series) * elapsed * (1.0 + 1e-12));
    });
  }

  TEST_CASE("lattice mismatch is an error") {
    const auto lat = FreqLattice::torus(1, 2 * kPi, 8);
    SamplePath p;
    p.times = uniform_grid(1.0, 4);
    p.values.assign(5, 0.0);
    const auto mu = occupation_fourier(p, 0.0, 1.0, FreqLattice::torus(1, 2 * kPi, 4));
    CHECK_THROWS_AS(convolve_spectral(drift_constant(lat, 1.0), mu, 32), LatticeError);
    const auto L = occupation_histogram(p, 0.0, 1.0, SpaceGrid::box(1, -1.0, 1.0, 8));
    CHECK_THROWS_AS(convolve_spectral(drift_constant(lat, 1.0), L, 0, 32), LatticeError);
  }

  TEST_CASE("Hölder norm examples") {
    LatticeField c{1, -kPi, 2 * kPi, 128, std::vector<double>(128, -0.6)};
    CHECK(holder_spatial_norm(c, 0.5) == doctest::Approx(0.6));
    CHECK(holder_spatial_norm(c, 1.5) == doctest::Approx(0.6));
    const auto lat = FreqLattice::torus(1, 2 * kPi, 4);
    const auto f = drift_field(drift_cosine(lat, 1), 1024);
    CHECK(std::abs(holder_spatial_norm(f, 1.0) - 2.0) <= 5e-2);
    CHECK_THROWS_AS(holder_spatial_norm(f, 0.0), DomainError);
  }

  TEST_CASE("Hölder norm is monotone in theta for a fixed field") {
    const auto f = drift_field(synth_besov_drift(1.0, FreqLattice::torus(1, 2 * kPi, 16), 8), 256);
    double prev = 0.0;
    for (double th : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      const double v = holder_spatial_norm(f, th);
      CHECK(v >= prev);
      prev = v;
    }
  }
}
