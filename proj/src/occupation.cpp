#include "vlab/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vlab/errors.hpp"
#include "vlab/fft.hpp"
#include "vlab/stats.hpp"

namespace vlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kAnchor = 32;

// e^{i k a} for k = 0..K, re-anchored every kAnchor steps to bound drift.
void phase_powers(double a, int K, double* re, double* im) {
  const double c1 = std::cos(a), s1 = std::sin(a);
  for (int k = 0; k <= K; ++k) {
    if (k % kAnchor == 0) {
      re[k] = std::cos(a * k);
      im[k] = std::sin(a * k);
    } else {
      re[k] = re[k - 1] * c1 - im[k - 1] * s1;
      im[k] = re[k - 1] * s1 + im[k - 1] * c1;
    }
  }
}

std::pair<std::size_t, std::size_t> step_range(const SamplePath& path, double s, double t) {
  if (!(s < t)) throw GridError("occupation window needs s < t");
  return {path.index_of(s), path.index_of(t)};
}

void fourier_fast_1d(const SamplePath& path, std::size_t i0, std::size_t i1, const FreqLattice& lat,
                     std::span<cplx> out) {
  constexpr int Q = 14;
  const int K = lat.K;
  int M = 16;
  while (M < 8 * (K + 1)) M <<= 1;
  const double P = lat.period();
  const double h = P / M;
  std::vector<std::vector<cplx>> H(Q, std::vector<cplx>(static_cast<std::size_t>(M), 0.0));
  double inv_fact[Q];
  inv_fact[0] = 1.0;
  for (int q = 1; q < Q; ++q) inv_fact[q] = inv_fact[q - 1] / q;
  for (std::size_t r = i0; r < i1; ++r) {
    const double w = path.times[r + 1] - path.times[r];
    double y = std::fmod(path.at(r), P);
    if (y < 0.0) y += P;
    long long m = std::llround(y / h);
    const double delta = y - static_cast<double>(m) * h;
    m %= M;
    double pw = w;
    for (int q = 0; q < Q; ++q) {
      H[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)] += pw * inv_fact[q];
      pw *= delta;
    }
  }
  const std::vector<int> dims{M};
  for (auto& hq : H) dft(hq, dims, +1);
  for (int k = 0; k <= K; ++k) {
    const cplx ik(0.0, lat.dxi * k);
    cplx acc = 0.0;
    for (int q = Q - 1; q >= 0; --q) acc = acc * ik + H[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(K + k)] = acc;
    out[static_cast<std::size_t>(K - k)] = std::conj(acc);
  }
}

}  // namespace

double LocalTimeField::mass(std::size_t m) const {
  double s = 0.0;
  for (double v : row(m)) s += v;
  return s * grid.cell_volume();
}

LocalTimeField occupation_histogram(const SamplePath& path, double s, double t, const SpaceGrid& grid) {
  const double marks[2] = {s, t};
  return occupation_histogram_marks(path, marks, grid);
}

LocalTimeField occupation_histogram_marks(const SamplePath& path, std::span<const double> marks,
                                          const SpaceGrid& grid) {
  if (marks.size() < 2) throw GridError("local time needs at least two marks");
  if (grid.dim != path.dim) throw LatticeError("space grid dimension does not match the path");
  std::vector<std::size_t> idx;
  for (double m : marks) idx.push_back(path.index_of(m));
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] <= idx[i - 1]) throw GridError("local time marks must increase");

  LocalTimeField L;
  L.grid = grid;
  L.marks.assign(marks.begin(), marks.end());
  const std::size_t nc = grid.total();
  L.density.assign(marks.size() * nc, 0.0);
  const double inv_vol = 1.0 / grid.cell_volume();
  std::vector<double> cur(nc, 0.0);
  for (std::size_t m = 1; m < idx.size(); ++m) {
    for (std::size_t r = idx[m - 1]; r < idx[m]; ++r) {
      const double w = path.times[r + 1] - path.times[r];
      const long long c = grid.locate(path.point(r));
      if (c < 0)
        L.clipped_mass += w;
      else
        cur[static_cast<std::size_t>(c)] += w * inv_vol;
    }
    std::copy(cur.begin(), cur.end(), L.density.begin() + static_cast<std::ptrdiff_t>(m * nc));
  }
  if (L.clipped_mass > 0.0)
    L.warnings.push_back("path left the space box; clipped occupation mass " + std::to_string(L.clipped_mass));
  return L;
}

void occupation_fourier_steps(const SamplePath& path, std::size_t i0, std::size_t i1, const FreqLattice& lat,
                              std::span<cplx> out) {
  if (lat.dim != path.dim) throw LatticeError("frequency lattice dimension does not match the path");
  if (out.size() != lat.size()) throw LatticeError("output size does not match the lattice");
  const int K = lat.K;
  const int d = lat.dim;
  const auto W = static_cast<std::size_t>(2 * K + 1);
  std::fill(out.begin(), out.end(), cplx(0.0));
  if (d == 1) {
    std::vector<double> re(W, 0.0), im(W, 0.0), pr(W), pi(W);
    for (std::size_t r = i0; r < i1; ++r) {
      const double w = path.times[r + 1] - path.times[r];
      phase_powers(lat.dxi * path.at(r), K, pr.data(), pi.data());
      for (int k = 0; k <= K; ++k) {
        re[static_cast<std::size_t>(k)] += w * pr[static_cast<std::size_t>(k)];
        im[static_cast<std::size_t>(k)] += w * pi[static_cast<std::size_t>(k)];
      }
    }
    for (int k = 0; k <= K; ++k) {
      const cplx v(re[static_cast<std::size_t>(k)], im[static_cast<std::size_t>(k)]);
      out[static_cast<std::size_t>(K + k)] = v;
      out[static_cast<std::size_t>(K - k)] = std::conj(v);
    }
    return;
  }
  std::vector<std::vector<cplx>> ax(static_cast<std::size_t>(d), std::vector<cplx>(W));
  std::vector<double> pr(static_cast<std::size_t>(K + 1)), pi(static_cast<std::size_t>(K + 1));
  std::vector<int> k(static_cast<std::size_t>(d));
  for (std::size_t r = i0; r < i1; ++r) {
    const double w = path.times[r + 1] - path.times[r];
    for (int a = 0; a < d; ++a) {
      phase_powers(lat.dxi * path.at(r, a), K, pr.data(), pi.data());
      auto& v = ax[static_cast<std::size_t>(a)];
      for (int j = 0; j <= K; ++j) {
        v[static_cast<std::size_t>(K + j)] = {pr[static_cast<std::size_t>(j)], pi[static_cast<std::size_t>(j)]};
        v[static_cast<std::size_t>(K - j)] = {pr[static_cast<std::size_t>(j)], -pi[static_cast<std::size_t>(j)]};
      }
    }
    for (std::size_t f = 0; f < out.size(); ++f) {
      lat.multi_index(f, k.data());
      cplx p = w;
      for (int a = 0; a < d; ++a) p *= ax[static_cast<std::size_t>(a)][static_cast<std::size_t>(k[static_cast<std::size_t>(a)] + K)];
      out[f] += p;
    }
  }
}

SpectralField occupation_fourier(const SamplePath& path, double s, double t, const FreqLattice& lattice,
                                 OccupationMethod method) {
  const auto [i0, i1] = step_range(path, s, t);
  SpectralField f{lattice, s, t, std::vector<cplx>(lattice.size())};
  bool fast = method == OccupationMethod::Fast;
  if (method == OccupationMethod::Auto) fast = lattice.dim == 1 && lattice.K >= 64 && i1 - i0 >= 256;
  if (fast) {
    if (lattice.dim != 1 || path.dim != 1) throw LatticeError("fast occupation transform supports d = 1 only");
    fourier_fast_1d(path, i0, i1, lattice, f.values);
  } else {
    occupation_fourier_steps(path, i0, i1, lattice, f.values);
  }
  // the zero mode is the elapsed time, exactly
  f.values[lattice.zero_index()] = path.times[i1] - path.times[i0];
  return f;
}

SpectralField histogram_transform(const LocalTimeField& L, std::size_t mark, const FreqLattice& lat) {
  if (lat.dim != L.grid.dim) throw LatticeError("lattice dimension does not match the local time");
  SpectralField f{lat, L.marks.front(), L.marks[mark], std::vector<cplx>(lat.size(), 0.0)};
  const auto row = L.row(mark);
  const double vol = L.grid.cell_volume();
  const int d = lat.dim;
  std::vector<int> ci(static_cast<std::size_t>(d));
  std::vector<double> x(static_cast<std::size_t>(d)), xi(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (row[c] == 0.0) continue;
    std::size_t rem = c;
    for (int a = d - 1; a >= 0; --a) {
      x[static_cast<std::size_t>(a)] = L.grid.center(static_cast<int>(rem % static_cast<std::size_t>(L.grid.cells)));
      rem /= static_cast<std::size_t>(L.grid.cells);
    }
    const double w = row[c] * vol;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      lat.xi(i, xi.data());
      double ph = 0.0;
      for (int a = 0; a < d; ++a) ph += xi[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      f.values[i] += w * cplx(std::cos(ph), std::sin(ph));
    }
  }
  return f;
}

SobolevNorm sobolev_norm(const SpectralField& field, double kappa, bool estimate_tail) {
  const auto& lat = field.lattice;
  const double pref = std::pow(lat.dxi / kTwoPi, lat.dim);
  SobolevNorm out;
  const double Xi = lat.cutoff();
  constexpr int kBins = 8;
  double bin_sum[kBins] = {};
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double r2 = lat.norm2(i);
    const double term = pref * std::pow(1.0 + r2, kappa) * std::norm(field.values[i]);
    out.truncated += term;
    const double r = std::sqrt(r2);
    if (r >= 0.5 * Xi && r <= Xi) {
      const int b = std::min(kBins - 1, static_cast<int>(kBins * std::log2(r / (0.5 * Xi))));
      bin_sum[b] += term;
    }
  }
  if (estimate_tail) {
    std::vector<double> lx, ly;
    for (int b = 0; b < kBins; ++b) {
      if (!(bin_sum[b] > 0.0)) continue;
      const double r0 = 0.5 * Xi * std::exp2(static_cast<double>(b) / kBins);
      const double r1 = 0.5 * Xi * std::exp2(static_cast<double>(b + 1) / kBins);
      lx.push_back(std::log(std::sqrt(r0 * r1)));
      ly.push_back(std::log(bin_sum[b] / (r1 - r0)));
    }
    if (lx.size() >= 3) {
      const auto fit = fit_line(lx, ly);
      out.decay = -fit.slope;
      if (out.decay > 1.0) {
        out.tail = std::exp(fit.intercept) * std::pow(Xi, 1.0 - out.decay) / (out.decay - 1.0);
      } else {
        out.tail = std::numeric_limits<double>::infinity();
      }
    }
    out.tail_fraction = out.truncated > 0.0 ? out.tail / out.truncated : 0.0;
    out.warning = out.tail_fraction > 0.1;
  }
  const double total = std::isfinite(out.tail) ? out.truncated + out.tail : out.truncated;
  out.norm = std::sqrt(total);
  return out;
}

double localtime_route_agreement(const SamplePath& path, double s, double t, const SpaceGrid& grid,
                                 const FreqLattice& lattice, double max_xi) {
  const auto direct = occupation_fourier(path, s, t, lattice, OccupationMethod::Direct);
  const auto L = occupation_histogram(path, s, t, grid);
  const auto hist = histogram_transform(L, 1, lattice);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (lattice.norm2(i) > max_xi * max_xi) continue;
    num += std::norm(direct.values[i] - hist.values[i]);
    den += std::norm(direct.values[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

LocalTimeFormulaResult localtime_formula_check(const FourierSeries& b, const SamplePath& path, double s, double t,
                                               std::span<const double> shifts, const SpaceGrid& grid) {
  if (!grid.periodic || std::abs(grid.width() - b.lattice.period()) > 1e-12 * b.lattice.period())
    throw LatticeError("local time formula check needs a periodic grid matching b's period");
  const auto [i0, i1] = step_range(path, s, t);
  const auto L = occupation_histogram(path, s, t, grid);
  const auto Lh = histogram_transform(L, 1, b.lattice);
  const int d = path.dim;
  LocalTimeFormulaResult res;
  std::vector<double> y(static_cast<std::size_t>(d), 0.0), xi(static_cast<std::size_t>(d));
  for (double sh : shifts) {
    double lhs = 0.0;
    for (std::size_t r = i0; r < i1; ++r) {
      const auto z = path.point(r);
      for (int a = 0; a < d; ++a) y[static_cast<std::size_t>(a)] = z[static_cast<std::size_t>(a)] + (a == 0 ? sh : 0.0);
      lhs += (path.times[r + 1] - path.times[r]) * b.eval(y);
    }
    double rhs = 0.0;
    for (std::size_t n = 0; n < b.coeffs.size(); ++n) {
      if (b.coeffs[n] == cplx(0.0)) continue;
      b.lattice.xi(n, xi.data());
      const cplx e(std::cos(xi[0] * sh), std::sin(xi[0] * sh));
      rhs += (b.coeffs[n] * e * Lh.values[n]).real();
    }
    res.lhs.push_back(lhs);
    res.rhs.push_back(rhs);
    res.max_error = std::max(res.max_error, std::abs(lhs - rhs));
  }
  return res;
}

}  // namespace vlab
