#include "vlab/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vlab/errors.hpp"
#include "vlab/rng.hpp"

namespace vlab {

namespace {

std::uint64_t mode_key(const int* k, int d) {
  std::uint64_t key = 0;
  for (int a = 0; a < d; ++a) key = key * 0x100003ULL + static_cast<std::uint64_t>(k[a] + (1 << 20));
  return key;
}

// mode is in the canonical half when its first nonzero index is positive
bool canonical(const int* k, int d) {
  for (int a = 0; a < d; ++a)
    if (k[a] != 0) return k[a] > 0;
  return true;
}

SpectralDrift wrap(FourierSeries s) {
  SpectralDrift b;
  b.series = std::move(s);
  b.beta_target = std::numeric_limits<double>::infinity();
  return b;
}

LatticeField convolve_coeffs(const SpectralDrift& b, std::span<const cplx> mu, int m) {
  const auto& lat = b.lattice();
  std::vector<cplx> a(lat.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = b.series.coeffs[i] * mu[i];
  return synthesize(lat, a, m, -0.5 * lat.period());
}

}  // namespace

double drift_sobolev_norm(const FourierSeries& b, double beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) s += std::pow(1.0 + b.lattice.norm2(i), beta) * std::norm(b.coeffs[i]);
  return std::sqrt(s);
}

SpectralDrift synth_besov_drift(double beta, const FreqLattice& lat, std::uint64_t seed) {
  const int d = lat.dim;
  const double decay = 0.5 * (beta + 0.5 * d + 0.05);
  SpectralDrift b;
  b.series = {lat, std::vector<cplx>(lat.size(), 0.0)};
  b.beta_target = beta;
  b.seed = seed;
  int k[8], mk[8];
  double target2 = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    lat.multi_index(i, k);
    const double w = std::pow(1.0 + lat.norm2(i), -decay);
    target2 += std::pow(1.0 + lat.norm2(i), beta) * w * w;
    if (!canonical(k, d)) continue;
    RngStream rng(seed, mode_key(k, d), 0, 11);
    if (i == lat.zero_index()) {
      b.series.coeffs[i] = w * rng.normal();
      continue;
    }
    const cplx a(rng.normal() * std::sqrt(0.5), rng.normal() * std::sqrt(0.5));
    b.series.coeffs[i] = w * a;
    for (int ax = 0; ax < d; ++ax) mk[ax] = -k[ax];
    b.series.coeffs[lat.flat_index(mk)] = w * std::conj(a);
  }
  b.target_norm = std::sqrt(target2);
  const double realized = drift_sobolev_norm(b.series, beta);
  if (realized > 0.0)
    for (auto& c : b.series.coeffs) c *= b.target_norm / realized;
  return b;
}

SpectralDrift drift_constant(const FreqLattice& lat, double c) { return wrap(FourierSeries::constant(lat, c)); }

SpectralDrift drift_cosine(const FreqLattice& lat, int mode, double amplitude) {
  return wrap(FourierSeries::cosine_mode(lat, mode, amplitude, 0.0));
}

SpectralDrift drift_sine(const FreqLattice& lat, int mode, double amplitude) {
  return wrap(FourierSeries::cosine_mode(lat, mode, 0.0, amplitude));
}

SpectralDrift drift_gaussian_bump(const FreqLattice& lat, double width) {
  if (!(width > 0.0)) throw ConfigError("bump width must be positive");
  FourierSeries s{lat, std::vector<cplx>(lat.size(), 0.0)};
  const double P = lat.period();
  const double c0 = std::pow(std::sqrt(2.0 * std::numbers::pi) * width / P, lat.dim);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] = c0 * std::exp(-0.5 * width * width * lat.norm2(i));
  return wrap(std::move(s));
}

LatticeField drift_field(const SpectralDrift& b, int m, double* imag_residue) {
  return synthesize(b.lattice(), b.series.coeffs, m, -0.5 * b.lattice().period(), imag_residue);
}

LatticeField convolve_spectral(const SpectralDrift& b, const SpectralField& mu, int m) {
  if (!(mu.lattice == b.lattice())) throw LatticeError("drift and occupation lattices differ");
  return convolve_coeffs(b, mu.values, m);
}

LatticeField convolve_spectral(const SpectralDrift& b, const LocalTimeField& L, std::size_t mark, int m) {
  const auto& lat = b.lattice();
  if (!L.grid.periodic || std::abs(L.grid.width() - lat.period()) > 1e-12 * lat.period())
    throw LatticeError("local time grid must be the drift's torus");
  const auto mu = histogram_transform(L, mark, lat);
  return convolve_coeffs(b, mu.values, m);
}

double holder_spatial_norm(const LatticeField& f, double theta) {
  if (!(theta > 0.0 && theta <= 2.0)) throw DomainError("holder_spatial_norm needs theta in (0,2]");
  const int d = f.dim;
  const int m = f.m;
  const double dx = f.dx();
  const std::size_t n = f.values.size();
  double sup = 0.0;
  for (double v : f.values) sup = std::max(sup, std::abs(v));

  // neighbour offsets with 0 < |o| dx <= 1, one of each +/- pair
  const int reach = std::min(m / 2, static_cast<int>(std::floor(1.0 / dx + 1e-12)));
  std::vector<std::vector<int>> offs;
  std::vector<double> dist;
  std::vector<int> o(static_cast<std::size_t>(d), -reach);
  while (true) {
    double r2 = 0.0;
    for (int v : o) r2 += static_cast<double>(v) * v;
    const double r = std::sqrt(r2) * dx;
    if (r > 0.0 && r <= 1.0 + 1e-12 && canonical(o.data(), d)) {
      offs.push_back(o);
      dist.push_back(r);
    }
    int a = d - 1;
    while (a >= 0 && o[static_cast<std::size_t>(a)] == reach) o[static_cast<std::size_t>(a--)] = -reach;
    if (a < 0) break;
    ++o[static_cast<std::size_t>(a)];
  }

  const auto shift = [&](std::size_t flat, const std::vector<int>& off) {
    std::size_t out = 0, stride = 1, rem = flat;
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (int a = d - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(m));
      rem /= static_cast<std::size_t>(m);
    }
    for (int a = d - 1; a >= 0; --a) {
      const int j = ((idx[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)]) % m + m) % m;
      out += static_cast<std::size_t>(j) * stride;
      stride *= static_cast<std::size_t>(m);
    }
    return out;
  };

  if (theta <= 1.0) {
    double q = 0.0;
    for (std::size_t p = 0; p < offs.size(); ++p) {
      const double den = std::pow(dist[p], theta);
      for (std::size_t i = 0; i < n; ++i) q = std::max(q, std::abs(f.values[shift(i, offs[p])] - f.values[i]) / den);
    }
    return sup + q;
  }

  std::vector<std::vector<double>> g(static_cast<std::size_t>(d), std::vector<double>(n));
  double gsup = 0.0;
  for (int a = 0; a < d; ++a) {
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(a)] = 1;
    std::vector<int> me(static_cast<std::size_t>(d), 0);
    me[static_cast<std::size_t>(a)] = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (f.values[shift(i, e)] - f.values[shift(i, me)]) / (2.0 * dx);
      g[static_cast<std::size_t>(a)][i] = v;
      gsup = std::max(gsup, std::abs(v));
    }
  }
  double q = 0.0;
  for (std::size_t p = 0; p < offs.size(); ++p) {
    const double den = std::pow(dist[p], theta - 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = shift(i, offs[p]);
      double s2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double dg = g[static_cast<std::size_t>(a)][j] - g[static_cast<std::size_t>(a)][i];
        s2 += dg * dg;
      }
      q = std::max(q, std::sqrt(s2) / den);
    }
  }
  return sup + gsup + q;
}

}  // namespace vlab
