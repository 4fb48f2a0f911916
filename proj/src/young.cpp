#include "vlab/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vlab/errors.hpp"
#include "vlab/fft.hpp"
#include "vlab/parallel.hpp"
#include "vlab/occupation.hpp"
#include "vlab/stats.hpp"

namespace vlab {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

AnalyticGamma::AnalyticGamma(std::vector<double> marks, int dim, Fn gamma, Fn jacobian)
    : marks_(std::move(marks)), dim_(dim), gamma_(std::move(gamma)), jac_(std::move(jacobian)) {
  if (marks_.size() < 2) throw GridError("a Gamma field needs at least two marks");
  if (dim_ < 1) throw ConfigError("dimension must be positive");
  for (std::size_t i = 1; i < marks_.size(); ++i)
    if (!(marks_[i] > marks_[i - 1])) throw GridError("marks must be strictly increasing");
}

void AnalyticGamma::increment(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const {
  gamma_(marks_[i], marks_[j], x, out);
}

void AnalyticGamma::jacobian(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const {
  if (!jac_) throw ConfigError("this Gamma field has no Jacobian");
  jac_(marks_[i], marks_[j], x, out);
}

std::span<const double> LatticeGamma::anchor(std::size_t i, int c) const {
  return {anchors_.data() + (i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(c)) * npts_, npts_};
}

double LatticeGamma::interp(const double* field, std::span<const double> x) const {
  const double dx = period_ / m_;
  int base[8];
  double w[8][4];
  for (int a = 0; a < dim_; ++a) {
    const double u = (x[static_cast<std::size_t>(a)] - lo_) / dx;
    const double fl = std::floor(u);
    const double t = u - fl;
    const long long i = static_cast<long long>(fl);
    base[a] = static_cast<int>(((i - 1) % m_ + m_) % m_);
    w[a][0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[a][1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[a][2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[a][3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  }
  const int stencil = 1 << (2 * dim_);
  double sum = 0.0;
  for (int s = 0; s < stencil; ++s) {
    std::size_t flat = 0;
    double weight = 1.0;
    for (int a = 0; a < dim_; ++a) {
      const int o = (s >> (2 * (dim_ - 1 - a))) & 3;
      flat = flat * static_cast<std::size_t>(m_) + static_cast<std::size_t>((base[a] + o) % m_);
      weight *= w[a][o];
    }
    sum += weight * field[flat];
  }
  return sum;
}

void LatticeGamma::increment(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const {
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t c = 0; c < d; ++c) {
    const double* fi = anchors_.data() + (i * d + c) * npts_;
    const double* fj = anchors_.data() + (j * d + c) * npts_;
    out[c] = interp(fj, x) - interp(fi, x);
  }
}

void LatticeGamma::jacobian(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const {
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t c = 0; c < d * d; ++c) {
    const double* fi = grads_.data() + (i * d * d + c) * npts_;
    const double* fj = grads_.data() + (j * d * d + c) * npts_;
    out[c] = interp(fj, x) - interp(fi, x);
  }
}

LatticeGamma build_gamma_from_drift(std::span<const SpectralDrift> b, const SamplePath& path,
                                    const GammaBuildOptions& opts) {
  if (b.empty()) throw ConfigError("at least one drift component is required");
  const int d = path.dim;
  if (static_cast<int>(b.size()) != d) throw ConfigError("need one drift component per path coordinate");
  if (d > 3) throw ConfigError("lattice Gamma fields support dim <= 3");
  const FreqLattice lat = b[0].lattice();
  for (const auto& c : b)
    if (!(c.lattice() == lat)) throw LatticeError("drift components must share one lattice");
  if (lat.dim != d) throw LatticeError("drift lattice dimension does not match the path");
  if (opts.stride == 0) throw ConfigError("stride must be positive");
  const std::size_t steps = path.size() - 1;
  if (steps == 0 || steps % opts.stride != 0) throw GridError("path steps must be a multiple of the stride");
  if (opts.m <= 2 * lat.K) throw LatticeError("spatial grid too coarse for the drift lattice");

  LatticeGamma G;
  G.dim_ = d;
  G.m_ = opts.m;
  G.period_ = lat.period();
  G.lo_ = -0.5 * G.period_;
  G.npts_ = ipow(static_cast<std::size_t>(opts.m), d);
  const std::size_t n_marks = steps / opts.stride + 1;
  G.marks_.resize(n_marks);
  for (std::size_t i = 0; i < n_marks; ++i) G.marks_[i] = path.times[i * opts.stride];

  const auto D = static_cast<std::size_t>(d);
  const std::size_t L = lat.size();
  std::vector<cplx> mu(n_marks * L, cplx(0.0));
  {
    std::vector<cplx> block(L);
    for (std::size_t i = 1; i < n_marks; ++i) {
      occupation_fourier_steps(path, (i - 1) * opts.stride, i * opts.stride, lat, block);
      block[lat.zero_index()] = path.times[i * opts.stride] - path.times[(i - 1) * opts.stride];
      for (std::size_t q = 0; q < L; ++q) mu[i * L + q] = mu[(i - 1) * L + q] + block[q];
    }
  }

  G.anchors_.assign(n_marks * D * G.npts_, 0.0);
  G.grads_.assign(n_marks * D * D * G.npts_, 0.0);
  std::vector<double> xi(D);
  std::vector<cplx> coef(L);
  for (std::size_t i = 1; i < n_marks; ++i) {
    for (std::size_t c = 0; c < D; ++c) {
      const auto& cn = b[c].series.coeffs;
      for (std::size_t q = 0; q < L; ++q) coef[q] = cn[q] * mu[i * L + q];
      auto A = synthesize(lat, coef, opts.m, G.lo_);
      std::copy(A.values.begin(), A.values.end(), G.anchors_.begin() + static_cast<std::ptrdiff_t>((i * D + c) * G.npts_));
      for (std::size_t a = 0; a < D; ++a) {
        std::vector<cplx> g(L);
        for (std::size_t q = 0; q < L; ++q) {
          lat.xi(q, xi.data());
          g[q] = cplx(0.0, xi[a]) * coef[q];
        }
        auto dA = synthesize(lat, g, opts.m, G.lo_);
        std::copy(dA.values.begin(), dA.values.end(),
                  G.grads_.begin() + static_cast<std::ptrdiff_t>((i * D * D + c * D + a) * G.npts_));
      }
    }
  }

  GammaReport rep;
  rep.gamma = opts.gamma;
  rep.bound = opts.bound;
  if (opts.verify) {
    const std::size_t n = n_marks - 1;
    std::vector<cplx> inc(L), g(L);
    for (std::size_t lag = 1; lag <= n; lag *= 2) {
      for (std::size_t w = 0; w < opts.windows_per_lag && (w + 1) * lag <= n; ++w) {
        const std::size_t i0 = w * lag;
        const std::size_t i1 = i0 + lag;
        const double h = std::pow(G.marks_[i1] - G.marks_[i0], opts.gamma);
        for (std::size_t c = 0; c < D; ++c) {
          const auto& cn = b[c].series.coeffs;
          for (std::size_t q = 0; q < L; ++q) inc[q] = cn[q] * (mu[i1 * L + q] - mu[i0 * L + q]);
          rep.c0 = std::max(rep.c0, max_abs(synthesize(lat, inc, opts.m, G.lo_).values) / h);
          for (std::size_t a = 0; a < D; ++a) {
            for (std::size_t q = 0; q < L; ++q) {
              lat.xi(q, xi.data());
              g[q] = cplx(0.0, xi[a]) * inc[q];
            }
            rep.c1 = std::max(rep.c1, max_abs(synthesize(lat, g, opts.m, G.lo_).values) / h);
            for (std::size_t e = a; e < D; ++e) {
              for (std::size_t q = 0; q < L; ++q) {
                lat.xi(q, xi.data());
                g[q] = -xi[a] * xi[e] * inc[q];
              }
              rep.c2 = std::max(rep.c2, max_abs(synthesize(lat, g, opts.m, G.lo_).values) / h);
            }
          }
        }
      }
    }
    rep.holder_c2 = rep.c0 + rep.c1 + rep.c2;
    rep.pass = std::isfinite(rep.holder_c2) && rep.holder_c2 <= opts.bound;
    if (!rep.pass)
      throw RegularityError("Gamma field fails the C^gamma_T C^2 bound: measured " + std::to_string(rep.holder_c2) +
                            " > " + std::to_string(opts.bound));
  }
  G.report_ = rep;
  return G;
}

SewingResult sewing_integral(const GammaField& gamma, std::span<const double> y, const SewingOptions& opts) {
  const std::size_t n = gamma.marks().size() - 1;
  const auto d = static_cast<std::size_t>(gamma.dim());
  if (y.size() != (n + 1) * d) throw ConfigError("path y must hold one point per mark");
  int max_depth = 0;
  while ((n % (std::size_t{1} << (max_depth + 1))) == 0 && (std::size_t{1} << (max_depth + 1)) <= n) ++max_depth;
  const int depth = opts.depth < 0 ? max_depth : opts.depth;
  if (depth > max_depth) throw GridError("mark count is not divisible by 2^depth");

  SewingResult r;
  r.level_totals.assign(static_cast<std::size_t>(depth + 1) * d, 0.0);
  r.cumulative.assign((n + 1) * d, 0.0);
  std::vector<double> out(d);
  for (int l = 0; l <= depth; ++l) {
    const std::size_t stride = std::size_t{1} << (depth - l);
    double* tot = r.level_totals.data() + static_cast<std::size_t>(l) * d;
    for (std::size_t u = 0; u + stride <= n; u += stride) {
      gamma.increment(u, u + stride, y.subspan(u * d, d), out);
      for (std::size_t c = 0; c < d; ++c) tot[c] += out[c];
      if (l == depth)
        for (std::size_t c = 0; c < d; ++c) r.cumulative[(u + stride) * d + c] = r.cumulative[u * d + c] + out[c];
    }
    // remainder past the last full block (only when n is not a multiple of the stride)
    const std::size_t done = (n / stride) * stride;
    if (done < n) {
      gamma.increment(done, n, y.subspan(done * d, d), out);
      for (std::size_t c = 0; c < d; ++c) tot[c] += out[c];
    }
  }
  double scale = 0.0;
  for (double v : r.level_totals) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-13 * std::max(1.0, scale);
  std::vector<double> xs, ls;
  for (int l = 1; l <= depth; ++l) {
    double m = 0.0;
    for (std::size_t c = 0; c < d; ++c)
      m = std::max(m, std::abs(r.level_totals[static_cast<std::size_t>(l) * d + c] -
                               r.level_totals[static_cast<std::size_t>(l - 1) * d + c]));
    r.deltas.push_back(m);
    if (m > tiny) {
      xs.push_back(l);
      ls.push_back(std::log2(m));
    }
  }
  r.compensated.assign(r.level_totals.end() - static_cast<std::ptrdiff_t>(d), r.level_totals.end());
  if (xs.size() < 2) {
    r.exact = true;
    r.rate = std::numeric_limits<double>::infinity();
    return r;
  }
  // use the finest levels; coarse ones are pre-asymptotic
  const std::size_t keep = std::min<std::size_t>(xs.size(), 4);
  const auto fit = fit_line(std::span<const double>(xs).last(keep), std::span<const double>(ls).last(keep));
  r.rate = std::exp2(-fit.slope);
  if (opts.certify && !(r.rate >= opts.min_rate))
    throw ConvergenceError("sewing level sums do not contract: measured rate " + std::to_string(r.rate), r.rate);
  if (depth >= 2 && r.deltas[static_cast<std::size_t>(depth - 1)] > tiny) {
    const double rho = std::clamp(1.0 / r.rate, 0.0, 0.95);
    const double f = rho / (1.0 - rho);
    for (std::size_t c = 0; c < d; ++c) {
      const double last = r.level_totals[static_cast<std::size_t>(depth) * d + c];
      const double prev = r.level_totals[static_cast<std::size_t>(depth - 1) * d + c];
      r.compensated[c] = last + (last - prev) * f;
    }
  }
  return r;
}

namespace {

struct WindowResult {
  std::size_t iterations = 0;
  double factor = 0.0;
  bool rejected = false;
};

// Picard on [a, b]; theta[a] is fixed, theta[a+1..b] is overwritten.
WindowResult picard_window(const GammaField& G, std::vector<double>& theta, std::size_t a, std::size_t b,
                           const PicardConfig& cfg, bool may_reject) {
  const auto d = static_cast<std::size_t>(G.dim());
  const auto& t = G.marks();
  const std::size_t len = b - a + 1;
  std::vector<double> cur(len * d), next(len * d), out(d);
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t c = 0; c < d; ++c) cur[i * d + c] = theta[a * d + c] + cfg.ramp * (t[a + i] - t[a]);
  WindowResult w;
  double prev_diff = -1.0;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    for (std::size_t c = 0; c < d; ++c) next[c] = theta[a * d + c];
    for (std::size_t k = 0; k + 1 < len; ++k) {
      G.increment(a + k, a + k + 1, std::span<const double>(cur).subspan(k * d, d), out);
      for (std::size_t c = 0; c < d; ++c) next[(k + 1) * d + c] = next[k * d + c] + out[c];
    }
    double diff = 0.0;
    for (std::size_t q = 0; q < cur.size(); ++q) diff = std::max(diff, std::abs(next[q] - cur[q]));
    cur.swap(next);
    w.iterations = it;
    if (prev_diff > 1e-14) {
      const double ratio = diff / prev_diff;
      if (it <= 3) w.factor = std::max(w.factor, ratio);
      if (may_reject && it <= 3 && ratio > cfg.max_contraction) {
        w.rejected = true;
        return w;
      }
    }
    if (diff <= cfg.tol) {
      for (std::size_t i = 1; i < len; ++i)
        for (std::size_t c = 0; c < d; ++c) theta[(a + i) * d + c] = cur[i * d + c];
      return w;
    }
    prev_diff = diff;
  }
  throw ConvergenceError("Picard iteration did not reach the tolerance", w.factor);
}

}  // namespace

YoungSolution picard_solve(const GammaField& gamma, std::span<const double> xi0, const PicardConfig& cfg) {
  const auto d = static_cast<std::size_t>(gamma.dim());
  if (xi0.size() != d) throw ConfigError("initial condition has the wrong dimension");
  if (!(cfg.tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (!(cfg.max_contraction > 0.0 && cfg.max_contraction < 1.0)) throw ConfigError("max_contraction must lie in (0,1)");
  const std::size_t n = gamma.marks().size() - 1;
  YoungSolution sol;
  sol.times = gamma.marks();
  sol.dim = gamma.dim();
  sol.theta.assign((n + 1) * d, 0.0);
  std::copy(xi0.begin(), xi0.end(), sol.theta.begin());
  std::size_t tau = cfg.window == 0 ? n : std::min(cfg.window, n);
  std::size_t a = 0;
  while (a < n) {
    const std::size_t b = std::min(n, a + tau);
    const auto w = picard_window(gamma, sol.theta, a, b, cfg, b - a > 1);
    if (w.rejected) {
      tau = std::max<std::size_t>(1, (b - a) / 2);
      continue;
    }
    sol.window_starts.push_back(a);
    sol.contraction.push_back(w.factor);
    sol.iterations.push_back(w.iterations);
    a = b;
  }
  sol.residual = fixed_point_residual(gamma, sol);
  return sol;
}

YoungSolution euler_solve(const GammaField& gamma, std::span<const double> xi0) {
  const auto d = static_cast<std::size_t>(gamma.dim());
  if (xi0.size() != d) throw ConfigError("initial condition has the wrong dimension");
  const std::size_t n = gamma.marks().size() - 1;
  YoungSolution sol;
  sol.times = gamma.marks();
  sol.dim = gamma.dim();
  sol.theta.assign((n + 1) * d, 0.0);
  std::copy(xi0.begin(), xi0.end(), sol.theta.begin());
  std::vector<double> out(d);
  for (std::size_t k = 0; k < n; ++k) {
    gamma.increment(k, k + 1, std::span<const double>(sol.theta).subspan(k * d, d), out);
    for (std::size_t c = 0; c < d; ++c) sol.theta[(k + 1) * d + c] = sol.theta[k * d + c] + out[c];
  }
  sol.window_starts = {0};
  sol.contraction = {0.0};
  sol.iterations = {1};
  sol.residual = 0.0;
  return sol;
}

double fixed_point_residual(const GammaField& gamma, const YoungSolution& sol) {
  const auto d = static_cast<std::size_t>(gamma.dim());
  const std::size_t n = gamma.marks().size() - 1;
  std::vector<double> acc(sol.theta.begin(), sol.theta.begin() + static_cast<std::ptrdiff_t>(d)), out(d);
  double res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    gamma.increment(k, k + 1, std::span<const double>(sol.theta).subspan(k * d, d), out);
    for (std::size_t c = 0; c < d; ++c) {
      acc[c] += out[c];
      res = std::max(res, std::abs(sol.theta[(k + 1) * d + c] - acc[c]));
    }
  }
  return res;
}

std::vector<double> reconstruct(const YoungSolution& sol, const SamplePath& path) {
  const auto d = static_cast<std::size_t>(sol.dim);
  if (path.dim != sol.dim) throw ConfigError("path dimension does not match the solution");
  std::vector<double> x(sol.theta.size());
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const std::size_t j = path.index_of(sol.times[i]);
    for (std::size_t c = 0; c < d; ++c) x[i * d + c] = sol.theta[i * d + c] + path.at(j, static_cast<int>(c));
  }
  return x;
}

FlowDerivative flow_derivative(const GammaField& gamma, const YoungSolution& sol, const PicardConfig& cfg) {
  const auto d = static_cast<std::size_t>(gamma.dim());
  const std::size_t n = gamma.marks().size() - 1;
  const std::size_t dd = d * d;
  std::vector<double> grad(n * dd);
  for (std::size_t k = 0; k < n; ++k)
    gamma.jacobian(k, k + 1, std::span<const double>(sol.theta).subspan(k * d, d),
                   std::span<double>(grad).subspan(k * dd, dd));
  FlowDerivative fd;
  fd.J.assign((n + 1) * dd, 0.0);
  for (std::size_t c = 0; c < d; ++c) fd.J[c * d + c] = 1.0;
  auto starts = sol.window_starts;
  if (starts.empty()) starts = {0};
  for (std::size_t w = 0; w < starts.size(); ++w) {
    const std::size_t a = starts[w];
    const std::size_t b = w + 1 < starts.size() ? starts[w + 1] : n;
    const std::size_t len = b - a + 1;
    std::vector<double> cur(len * dd), next(len * dd);
    for (std::size_t i = 0; i < len; ++i)
      std::copy_n(fd.J.begin() + static_cast<std::ptrdiff_t>(a * dd), dd, cur.begin() + static_cast<std::ptrdiff_t>(i * dd));
    std::size_t it = 0;
    for (;;) {
      ++it;
      std::copy_n(fd.J.begin() + static_cast<std::ptrdiff_t>(a * dd), dd, next.begin());
      for (std::size_t k = 0; k + 1 < len; ++k) {
        const double* g = grad.data() + (a + k) * dd;
        const double* J = cur.data() + k * dd;
        double* nx = next.data() + (k + 1) * dd;
        const double* nk = next.data() + k * dd;
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) {
            double s = 0.0;
            for (std::size_t q = 0; q < d; ++q) s += g[r * d + q] * J[q * d + c];
            nx[r * d + c] = nk[r * d + c] + s;
          }
      }
      double diff = 0.0;
      for (std::size_t q = 0; q < cur.size(); ++q) diff = std::max(diff, std::abs(next[q] - cur[q]));
      cur.swap(next);
      if (diff <= cfg.tol) break;
      if (it >= cfg.max_iter + len) throw ConvergenceError("flow derivative iteration did not converge", diff);
    }
    fd.iterations.push_back(it);
    for (std::size_t i = 1; i < len; ++i)
      std::copy_n(cur.begin() + static_cast<std::ptrdiff_t>(i * dd), dd, fd.J.begin() + static_cast<std::ptrdiff_t>((a + i) * dd));
  }
  return fd;
}

double holder_norm(std::span<const double> times, std::span<const double> f, int dim, double g) {
  const auto d = static_cast<std::size_t>(dim);
  if (f.size() != times.size() * d) throw ConfigError("values must hold one point per time");
  if (!(g > 0.0 && g <= 1.0)) throw DomainError("Hölder exponent must lie in (0,1]");
  double best = 0.0;
  const std::size_t n = times.size();
#pragma omp parallel for reduction(max : best) schedule(dynamic, 16) num_threads(thread_count())
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double m = 0.0;
      for (std::size_t c = 0; c < d; ++c) m = std::max(m, std::abs(f[j * d + c] - f[i * d + c]));
      best = std::max(best, m / std::pow(times[j] - times[i], g));
    }
  return best;
}

}  // namespace vlab
