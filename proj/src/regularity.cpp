#include "vlab/regularity.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vlab/errors.hpp"
#include "vlab/occupation.hpp"
#include "vlab/parallel.hpp"
#include "vlab/stats.hpp"

namespace vlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double diagonal(const SamplePath& p, std::size_t i0, std::size_t i1) {
  double s = 0.0;
  for (std::size_t r = i0; r < i1; ++r) {
    const double w = p.times[r + 1] - p.times[r];
    s += w * w;
  }
  return s;
}

double uniform_step(const SamplePath& p) {
  const std::size_t n = p.size() - 1;
  const double h = (p.times.back() - p.times.front()) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(p.times[i + 1] - p.times[i] - h) > 1e-9 * h) throw GridError("time regularity needs a uniform grid");
  return h;
}

std::vector<std::size_t> lag_steps(std::span<const double> lags, double h, std::size_t n) {
  std::vector<std::size_t> L;
  for (double l : lags) {
    const double m = std::round(l / h);
    if (m < 1 || std::abs(m * h - l) > 1e-9 * l) throw GridError("lag is not a positive multiple of the grid step");
    if (static_cast<std::size_t>(m) > n) throw GridError("lag exceeds the path horizon");
    L.push_back(static_cast<std::size_t>(m));
  }
  return L;
}

}  // namespace

SpatialRegularity estimate_spatial_regularity(std::span<const SamplePath> ens, double s, double t,
                                              const FreqLattice& lat, const SpatialFitOptions& o) {
  const std::size_t R = ens.size();
  if (R < o.min_replicas) throw ConfigError("spatial regularity needs at least " + std::to_string(o.min_replicas) + " replicas");
  if (o.p < 2 || o.p % 2) throw ConfigError("moment order p must be an even integer >= 2");

  // radial log bins
  const int bpo = o.bins_per_octave;
  const double rmax = lat.cutoff() * std::sqrt(static_cast<double>(lat.dim));
  const int nb = static_cast<int>(std::floor(bpo * std::log2(rmax / lat.dxi))) + 1;
  std::vector<int> bin_of(lat.size(), -1);
  std::vector<double> bin_x(static_cast<std::size_t>(nb), 0.0);
  std::vector<double> bin_r(static_cast<std::size_t>(nb), 0.0);
  std::vector<int> bin_n(static_cast<std::size_t>(nb), 0);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double r2 = lat.norm2(i);
    if (r2 == 0.0) continue;
    const double r = std::sqrt(r2);
    const int b = std::min(nb - 1, static_cast<int>(std::floor(bpo * std::log2(r / lat.dxi) + 1e-9)));
    bin_of[i] = b;
    bin_x[static_cast<std::size_t>(b)] += std::log1p(r2);
    bin_r[static_cast<std::size_t>(b)] += std::log(r);
    ++bin_n[static_cast<std::size_t>(b)];
  }
  for (int b = 0; b < nb; ++b)
    if (bin_n[static_cast<std::size_t>(b)]) {
      bin_x[static_cast<std::size_t>(b)] /= bin_n[static_cast<std::size_t>(b)];
      bin_r[static_cast<std::size_t>(b)] = std::exp(bin_r[static_cast<std::size_t>(b)] / bin_n[static_cast<std::size_t>(b)]);
    }

  // per-replica bin means of |mu|^2 and |mu|^p
  std::vector<double> A2(R * static_cast<std::size_t>(nb), 0.0), Ap(R * static_cast<std::size_t>(nb), 0.0);
  const auto i0 = ens[0].index_of(s);
  const auto i1 = ens[0].index_of(t);
  const double floor = diagonal(ens[0], i0, i1);
  const auto RR = static_cast<long long>(R);
#pragma omp parallel for schedule(dynamic, 2) num_threads(thread_count())
  for (long long r = 0; r < RR; ++r) {
    const auto f = occupation_fourier(ens[static_cast<std::size_t>(r)], s, t, lat);
    double* a2 = A2.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(nb);
    double* ap = Ap.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(nb);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const int b = bin_of[i];
      if (b < 0) continue;
      const double m2 = std::norm(f.values[i]);
      a2[b] += m2;
      ap[b] += std::pow(m2, 0.5 * o.p);
    }
    for (int b = 0; b < nb; ++b)
      if (bin_n[static_cast<std::size_t>(b)]) {
        a2[b] /= bin_n[static_cast<std::size_t>(b)];
        ap[b] /= bin_n[static_cast<std::size_t>(b)];
      }
  }

  const auto bin_at = [&](double r) {
    return std::clamp(static_cast<int>(std::floor(bpo * std::log2(r / lat.dxi) + 1e-9)), 0, nb - 1);
  };
  const auto mean_col = [&](const std::vector<double>& A, std::span<const std::size_t> idx, int b) {
    double m = 0.0;
    for (auto r : idx) m += A[r * static_cast<std::size_t>(nb) + static_cast<std::size_t>(b)];
    return m / static_cast<double>(idx.size());
  };
  std::vector<std::size_t> all(R);
  std::iota(all.begin(), all.end(), 0);

  double cutoff = lat.cutoff();
  if (o.auto_cutoff) {
    while (cutoff / 8.0 >= 4.0 * lat.dxi && mean_col(A2, all, bin_at(cutoff / 2.0)) < o.floor_factor * floor)
      cutoff /= 2.0;
  }
  std::vector<int> fit_bins;
  for (int b = 0; b < nb; ++b) {
    const double r = bin_r[static_cast<std::size_t>(b)];
    if (bin_n[static_cast<std::size_t>(b)] && r >= o.fit_lo * cutoff && r <= o.fit_hi * cutoff) fit_bins.push_back(b);
  }
  if (fit_bins.size() < 3) throw FitError("too few frequency bins in the spatial fit window");

  const bool correct = o.self_term && o.p == 2;
  struct Fit {
    LinearFit line;
    std::vector<double> xi, m;
  };
  const auto fit_on = [&](std::span<const std::size_t> idx) {
    Fit F;
    std::vector<double> xs, ys;
    for (int b : fit_bins) {
      double e = mean_col(Ap, idx, b);
      if (correct) e -= floor;
      if (!(e > 0.0)) continue;
      xs.push_back(bin_x[static_cast<std::size_t>(b)]);
      ys.push_back(std::log(e) / o.p);
      F.xi.push_back(bin_r[static_cast<std::size_t>(b)]);
      F.m.push_back(std::exp(ys.back()));
    }
    if (xs.size() < 3) throw FitError("spatial moments fall below the diagonal floor in the fit window");
    F.line = fit_line(xs, ys);
    return F;
  };

  const auto F = fit_on(all);
  if (F.line.r2 < o.min_r2) throw FitError("spatial regularity fit has R^2 = " + std::to_string(F.line.r2));
  SpatialRegularity out;
  out.lambda_hat = -2.0 * F.line.slope;
  out.kappa_hat = out.lambda_hat - 0.5 * lat.dim;
  out.r2 = F.line.r2;
  out.cutoff = cutoff;
  out.xi = F.xi;
  out.moment = F.m;
  const auto ci = bootstrap_percentile(R, o.n_boot, o.boot_seed, o.level, [&](std::span<const std::size_t> idx) {
    try {
      return -2.0 * fit_on(idx).line.slope - 0.5 * lat.dim;
    } catch (const FitError&) {
      return out.kappa_hat;
    }
  });
  out.ci_lo = ci.lo;
  out.ci_hi = ci.hi;
  return out;
}

TimeRegularity estimate_time_regularity(std::span<const SamplePath> ens, double kappa, const FreqLattice& lat,
                                        std::span<const double> lags, const TimeFitOptions& o) {
  const std::size_t R = ens.size();
  if (R == 0) throw ConfigError("empty ensemble");
  if (lags.size() < 2) throw ConfigError("time regularity needs at least two lags");
  if (o.p < 2 || o.p % 2) throw ConfigError("moment order p must be an even integer >= 2");
  const double h = uniform_step(ens[0]);
  const std::size_t n = ens[0].size() - 1;
  const auto L = lag_steps(lags, h, n);
  std::size_t B = L[0];
  for (auto l : L) B = std::gcd(B, l);
  std::size_t extent = 0;
  std::vector<std::size_t> nwin(L.size());
  for (std::size_t j = 0; j < L.size(); ++j) {
    nwin[j] = std::min(o.max_windows, n / L[j]);
    extent = std::max(extent, nwin[j] * L[j]);
  }

  const std::size_t S = lat.size();
  const double pref = std::pow(lat.dxi / kTwoPi, lat.dim);
  std::vector<double> weight(S);
  double wsum = 0.0;
  for (std::size_t i = 0; i < S; ++i) {
    weight[i] = pref * std::pow(1.0 + lat.norm2(i), kappa);
    wsum += weight[i];
  }
  const bool correct = o.self_term && o.p == 2;

  std::vector<double> V(R * L.size(), 0.0);
  const auto RR = static_cast<long long>(R);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
  for (long long rr = 0; rr < RR; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    const auto& path = ens[r];
    std::vector<cplx> acc(S, 0.0), block(S);
    std::vector<std::vector<cplx>> snap(L.size(), std::vector<cplx>(S, 0.0));
    std::vector<std::size_t> done(L.size(), 0);
    for (std::size_t pos = 0; pos < extent; pos += B) {
      occupation_fourier_steps(path, pos, pos + B, lat, block);
      for (std::size_t i = 0; i < S; ++i) acc[i] += block[i];
      const std::size_t end = pos + B;
      for (std::size_t j = 0; j < L.size(); ++j) {
        if (end % L[j] || done[j] >= nwin[j]) continue;
        double sq = 0.0;
        for (std::size_t i = 0; i < S; ++i) sq += weight[i] * std::norm(acc[i] - snap[j][i]);
        if (correct) sq -= wsum * diagonal(path, end - L[j], end);
        V[r * L.size() + j] += o.p == 2 ? sq : std::pow(std::max(sq, 0.0), 0.5 * o.p);
        snap[j] = acc;
        ++done[j];
      }
    }
    for (std::size_t j = 0; j < L.size(); ++j) V[r * L.size() + j] /= static_cast<double>(nwin[j]);
  }

  std::vector<double> lx(L.size());
  for (std::size_t j = 0; j < L.size(); ++j) lx[j] = std::log(L[j] * h);
  const auto fit_on = [&](std::span<const std::size_t> idx, std::vector<double>* norms) {
    std::vector<double> ly(L.size());
    for (std::size_t j = 0; j < L.size(); ++j) {
      double m = 0.0;
      for (auto r : idx) m += V[r * L.size() + j];
      m /= static_cast<double>(idx.size());
      if (!(m > 0.0)) throw FitError("window norm estimate is not positive");
      ly[j] = std::log(m) / o.p;
      if (norms) norms->push_back(std::exp(ly[j]));
    }
    return fit_line(lx, ly);
  };
  std::vector<std::size_t> all(R);
  std::iota(all.begin(), all.end(), 0);
  TimeRegularity out;
  for (std::size_t j = 0; j < L.size(); ++j) out.lags.push_back(L[j] * h);
  const auto F = fit_on(all, &out.norms);
  if (F.r2 < o.min_r2) throw FitError("time regularity fit has R^2 = " + std::to_string(F.r2));
  out.gamma_hat = F.slope;
  out.r2 = F.r2;
  if (R >= 2) {
    const auto ci = bootstrap_percentile(R, o.n_boot, o.boot_seed, o.level, [&](std::span<const std::size_t> idx) {
      try {
        return fit_on(idx, nullptr).slope;
      } catch (const FitError&) {
        return out.gamma_hat;
      }
    });
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
  } else {
    const double z = std::sqrt(2.0) * boost::math::erf_inv(o.level);
    out.ci_lo = F.slope - z * F.slope_se;
    out.ci_hi = F.slope + z * F.slope_se;
  }
  return out;
}

MomentBoundReport mc_moment_bound_check(std::span<const SamplePath> ens, std::span<const double> xi,
                                        std::span<const double> lags, const MomentBoundOptions& o) {
  const std::size_t R = ens.size();
  if (R == 0) throw ConfigError("empty ensemble");
  if (o.p < 2 || o.p % 2) throw ConfigError("moment order p must be an even integer >= 2");
  const double h = uniform_step(ens[0]);
  const std::size_t n = ens[0].size() - 1;
  const auto L = lag_steps(lags, h, n);
  const std::size_t nx = xi.size(), nl = L.size();
  const bool correct = o.self_term && o.p == 2;

  std::vector<double> acc(R * nx * nl, 0.0);
  const auto RR = static_cast<long long>(R);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count())
  for (long long rr = 0; rr < RR; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    const auto& path = ens[r];
    for (std::size_t j = 0; j < nl; ++j) {
      const std::size_t w = std::min(o.max_windows, n / L[j]);
      for (std::size_t m = 0; m < w; ++m) {
        const std::size_t a = m * L[j], b = a + L[j];
        const double diag = correct ? diagonal(path, a, b) : 0.0;
        for (std::size_t k = 0; k < nx; ++k) {
          double re = 0.0, im = 0.0;
          for (std::size_t s = a; s < b; ++s) {
            const double dt = path.times[s + 1] - path.times[s];
            const double ph = xi[k] * path.at(s);
            re += dt * std::cos(ph);
            im += dt * std::sin(ph);
          }
          const double m2 = re * re + im * im;
          const double v = xi[k] == 0.0 ? m2 : (correct ? m2 - diag : std::pow(m2, 0.5 * o.p));
          acc[(r * nx + k) * nl + j] += v / static_cast<double>(w);
        }
      }
    }
  }

  MomentBoundReport rep;
  rep.xi.assign(xi.begin(), xi.end());
  for (auto l : L) rep.lags.push_back(l * h);
  rep.moments.assign(nx * nl, 0.0);
  std::vector<double> X, Y;
  for (std::size_t k = 0; k < nx; ++k)
    for (std::size_t j = 0; j < nl; ++j) {
      double m = 0.0;
      for (std::size_t r = 0; r < R; ++r) m += acc[(r * nx + k) * nl + j];
      m /= static_cast<double>(R);
      if (!(m > 0.0)) {
        rep.violations.push_back("non-positive moment at xi=" + std::to_string(xi[k]) + " lag=" + std::to_string(rep.lags[j]));
        m = std::numeric_limits<double>::min();
      }
      const double mm = std::pow(m, 1.0 / o.p);
      rep.moments[k * nl + j] = mm;
      X.insert(X.end(), {1.0, -0.5 * std::log1p(xi[k] * xi[k]), std::log(rep.lags[j])});
      Y.push_back(std::log(mm));
    }
  const auto beta = least_squares(X, Y, 3);
  rep.log_c = beta[0];
  rep.lambda = beta[1];
  rep.gamma = beta[2];
  rep.ratios.resize(nx * nl);
  for (std::size_t k = 0; k < nx; ++k)
    for (std::size_t j = 0; j < nl; ++j)
      rep.ratios[k * nl + j] =
          rep.moments[k * nl + j] / (std::pow(1.0 + xi[k] * xi[k], -0.5 * rep.lambda) * std::pow(rep.lags[j], rep.gamma));
  const double med = median(rep.ratios);
  rep.max_over_median = *std::max_element(rep.ratios.begin(), rep.ratios.end()) / med;
  rep.pass = rep.max_over_median <= o.max_ratio && rep.violations.empty();
  if (rep.max_over_median > o.max_ratio)
    rep.violations.push_back("max/median ratio " + std::to_string(rep.max_over_median) + " exceeds bound");
  return rep;
}

}  // namespace vlab
