#include "vlab/lattice.hpp"

#include <cmath>
#include <numbers>

#include "vlab/errors.hpp"
#include "vlab/fft.hpp"

namespace vlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}
}  // namespace

SpaceGrid SpaceGrid::box(int dim, double lo, double hi, int cells) {
  if (dim < 1 || cells < 1 || !(hi > lo)) throw LatticeError("invalid space box");
  return {dim, lo, (hi - lo) / cells, cells, false};
}

SpaceGrid SpaceGrid::torus(int dim, double period, int cells) {
  if (dim < 1 || cells < 1 || !(period > 0.0)) throw LatticeError("invalid torus grid");
  return {dim, -0.5 * period, period / cells, cells, true};
}

std::size_t SpaceGrid::total() const { return ipow(static_cast<std::size_t>(cells), dim); }

double SpaceGrid::cell_volume() const { return std::pow(dx, dim); }

long long SpaceGrid::locate(std::span<const double> x) const {
  long long flat = 0;
  const double w = width();
  for (int a = 0; a < dim; ++a) {
    double y = x[static_cast<std::size_t>(a)] - lo;
    if (periodic) {
      y = std::fmod(y, w);
      if (y < 0.0) y += w;
    }
    auto i = static_cast<long long>(std::floor(y / dx));
    if (periodic) {
      i = std::min<long long>(std::max<long long>(i, 0), cells - 1);
    } else if (i < 0 || i >= cells) {
      return -1;
    }
    flat = flat * cells + i;
  }
  return flat;
}

FreqLattice FreqLattice::torus(int dim, double period, int K) {
  if (dim < 1 || dim > 8 || K < 1 || !(period > 0.0)) throw LatticeError("invalid frequency lattice");
  return {dim, kTwoPi / period, K};
}

std::size_t FreqLattice::size() const { return ipow(static_cast<std::size_t>(2 * K + 1), dim); }

double FreqLattice::period() const { return kTwoPi / dxi; }

void FreqLattice::multi_index(std::size_t flat, int* k) const {
  const auto w = static_cast<std::size_t>(2 * K + 1);
  for (int a = dim - 1; a >= 0; --a) {
    k[a] = static_cast<int>(flat % w) - K;
    flat /= w;
  }
}

std::size_t FreqLattice::flat_index(const int* k) const {
  const auto w = static_cast<std::size_t>(2 * K + 1);
  std::size_t f = 0;
  for (int a = 0; a < dim; ++a) f = f * w + static_cast<std::size_t>(k[a] + K);
  return f;
}

void FreqLattice::xi(std::size_t flat, double* out) const {
  int k[8];
  multi_index(flat, k);
  for (int a = 0; a < dim; ++a) out[a] = dxi * k[a];
}

double FreqLattice::norm2(std::size_t flat) const {
  int k[8];
  multi_index(flat, k);
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += static_cast<double>(k[a]) * k[a];
  return s * dxi * dxi;
}

std::size_t FreqLattice::zero_index() const { return (size() - 1) / 2; }

double FourierSeries::eval(std::span<const double> x) const {
  double acc = 0.0;
  int k[8];
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == cplx(0.0, 0.0)) continue;
    lattice.multi_index(i, k);
    double ph = 0.0;
    for (int a = 0; a < lattice.dim; ++a) ph += lattice.dxi * k[a] * x[static_cast<std::size_t>(a)];
    acc += coeffs[i].real() * std::cos(ph) - coeffs[i].imag() * std::sin(ph);
  }
  return acc;
}

FourierSeries FourierSeries::constant(const FreqLattice& lat, double c) {
  FourierSeries f{lat, std::vector<cplx>(lat.size(), 0.0)};
  f.coeffs[lat.zero_index()] = c;
  return f;
}

FourierSeries FourierSeries::cosine_mode(const FreqLattice& lat, int mode, double a, double b) {
  if (mode < 1 || mode > lat.K) throw LatticeError("mode outside the lattice");
  FourierSeries f{lat, std::vector<cplx>(lat.size(), 0.0)};
  std::vector<int> k(static_cast<std::size_t>(lat.dim), 0);
  k[0] = mode;
  f.coeffs[lat.flat_index(k.data())] = cplx(0.5 * a, -0.5 * b);
  k[0] = -mode;
  f.coeffs[lat.flat_index(k.data())] = cplx(0.5 * a, 0.5 * b);
  return f;
}

LatticeField synthesize(const FreqLattice& lat, std::span<const cplx> a, int m, double lo, double* imag_residue) {
  if (a.size() != lat.size()) throw LatticeError("coefficient count does not match the lattice");
  if (m <= 2 * lat.K) throw LatticeError("spatial grid too coarse for the lattice");
  const int d = lat.dim;
  const std::size_t total = ipow(static_cast<std::size_t>(m), d);
  std::vector<cplx> buf(total, 0.0);
  int k[8];
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == cplx(0.0, 0.0)) continue;
    lat.multi_index(i, k);
    std::size_t f = 0;
    double ph = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      f = f * static_cast<std::size_t>(m) + static_cast<std::size_t>((k[ax] % m + m) % m);
      ph += lat.dxi * k[ax] * lo;
    }
    // grid point x_j = lo + j dx, so exp(i xi x_j) = exp(i xi lo) exp(2 pi i k j / m)
    buf[f] += a[i] * cplx(std::cos(ph), std::sin(ph));
  }
  std::vector<int> dims(static_cast<std::size_t>(d), m);
  dft(buf, dims, +1);
  LatticeField out{d, lo, lat.period(), m, std::vector<double>(total)};
  double res = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    out.values[i] = buf[i].real();
    res = std::max(res, std::abs(buf[i].imag()));
  }
  if (imag_residue) *imag_residue = res;
  return out;
}

}  // namespace vlab
