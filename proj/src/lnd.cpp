#include "vlab/lnd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"
#include "vlab/pathsim.hpp"
#include "vlab/rng.hpp"
#include "vlab/stats.hpp"

namespace vlab {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Numerators depend on (h, xi) only; zeta enters as a rescaling, so bisection
// over zeta reuses one table.
struct NumeratorTable {
  std::vector<double> t;   // sorted ascending
  std::vector<double> values;  // t x s x radius x direction
  std::size_t ns, nr, nd;

  double at(std::size_t it, std::size_t is, std::size_t ir, std::size_t id) const {
    return values[((it * ns + is) * nr + ir) * nd + id];
  }
};

NumeratorTable build_table(const VolterraKernel& k, const LevyModel& m, const LndProbeConfig& cfg) {
  NumeratorTable T;
  T.t = cfg.t_grid;
  std::sort(T.t.begin(), T.t.end());
  T.ns = cfg.s_fractions.size();
  T.nr = cfg.xi_radii.size();
  const auto d = static_cast<std::size_t>(m.dim);
  T.nd = cfg.directions.size() / d;
  T.values.assign(T.t.size() * T.ns * T.nr * T.nd, 0.0);
  const auto total = static_cast<long long>(T.values.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_count())
  for (long long f = 0; f < total; ++f) {
    auto rem = static_cast<std::size_t>(f);
    const std::size_t id = rem % T.nd;
    rem /= T.nd;
    const std::size_t ir = rem % T.nr;
    rem /= T.nr;
    const std::size_t is = rem % T.ns;
    const std::size_t it = rem / T.ns;
    std::vector<double> xi(d);
    for (std::size_t a = 0; a < d; ++a) xi[a] = cfg.xi_radii[ir] * cfg.directions[id * d + a];
    try {
      T.values[static_cast<std::size_t>(f)] = integrated_exponent(k, m, xi, cfg.s_fractions[is] * T.t[it]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return T;
}

LndInfimum infimum_from(const VolterraKernel& k, const LevyModel& m, const LndProbeConfig& cfg,
                        const NumeratorTable& T, double zeta, double alpha, bool refine) {
  LndInfimum out;
  out.value = std::numeric_limits<double>::infinity();
  out.small_radius_inf = out.large_radius_inf = out.value;
  std::size_t bi = 0, bs = 0, br = 0;
  out.per_t.assign(T.t.size(), std::numeric_limits<double>::infinity());
  for (std::size_t it = 0; it < T.t.size(); ++it)
    for (std::size_t is = 0; is < T.ns; ++is) {
      const double h = cfg.s_fractions[is] * T.t[it];
      for (std::size_t ir = 0; ir < T.nr; ++ir) {
        const double r = cfg.xi_radii[ir];
        const double den = std::pow(h, zeta) * std::pow(r, alpha);
        for (std::size_t id = 0; id < T.nd; ++id) {
          const double v = T.at(it, is, ir, id) / den;
          out.per_t[it] = std::min(out.per_t[it], v);
          if (r < 1.0)
            out.small_radius_inf = std::min(out.small_radius_inf, v);
          else
            out.large_radius_inf = std::min(out.large_radius_inf, v);
          if (v < out.value) {
            out.value = v;
            bi = it;
            bs = is;
            br = ir;
            out.direction = id;
          }
        }
      }
    }
  out.t = T.t[bi];
  out.s = out.t * (1.0 - cfg.s_fractions[bs]);
  out.radius = cfg.xi_radii[br];

  const std::size_t nl = std::min<std::size_t>(static_cast<std::size_t>(cfg.slope_levels), T.t.size());
  if (nl >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < nl; ++i) {
      lx.push_back(std::log(T.t[i]));
      ly.push_back(std::log(out.per_t[i]));
    }
    out.decay_slope = fit_line(lx, ly).slope;
  }

  if (refine) {
    // coordinate search in log radius and s-fraction between neighbouring grid values
    const auto d = static_cast<std::size_t>(m.dim);
    std::vector<double> dir(cfg.directions.begin() + static_cast<std::ptrdiff_t>(out.direction * d),
                            cfg.directions.begin() + static_cast<std::ptrdiff_t>((out.direction + 1) * d));
    const auto eval = [&](double frac, double r) {
      std::vector<double> xi(d);
      for (std::size_t a = 0; a < d; ++a) xi[a] = r * dir[a];
      const double h = frac * out.t;
      return integrated_exponent(k, m, xi, h) / (std::pow(h, zeta) * std::pow(r, alpha));
    };
    const auto nb = [](const std::vector<double>& g, std::size_t i) {
      std::vector<double> s = g;
      std::sort(s.begin(), s.end());
      const auto it = std::find(s.begin(), s.end(), g[i]);
      const auto j = static_cast<std::size_t>(std::distance(s.begin(), it));
      return std::make_pair(s[j > 0 ? j - 1 : j], s[j + 1 < s.size() ? j + 1 : j]);
    };
    const auto [rlo, rhi] = nb(cfg.xi_radii, br);
    const auto [flo, fhi] = nb(cfg.s_fractions, bs);
    double frac = cfg.s_fractions[bs], r = out.radius;
    for (int q = 0; q <= 8; ++q) {
      const double rr = std::exp(std::log(rlo) + (std::log(rhi) - std::log(rlo)) * q / 8.0);
      const double v = eval(frac, rr);
      if (v < out.value) {
        out.value = v;
        r = rr;
      }
    }
    for (int q = 0; q <= 8; ++q) {
      const double ff = flo + (fhi - flo) * q / 8.0;
      if (!(ff > 0.0)) continue;
      const double v = eval(ff, r);
      if (v < out.value) {
        out.value = v;
        frac = ff;
      }
    }
    out.radius = r;
    out.s = out.t * (1.0 - frac);
    if (r < 1.0)
      out.small_radius_inf = std::min(out.small_radius_inf, out.value);
    else
      out.large_radius_inf = std::min(out.large_radius_inf, out.value);
  }
  return out;
}

}  // namespace

LndProbeConfig LndProbeConfig::standard(int dim, double t_max, double t_min, int n_random, std::uint64_t seed) {
  LndProbeConfig c;
  const int nt = 13;
  for (int i = 0; i < nt; ++i) c.t_grid.push_back(t_max * std::pow(t_min / t_max, static_cast<double>(i) / (nt - 1)));
  c.s_fractions = {1.0, 0.5, 0.25, 0.1, 0.03, 0.01};
  for (int i = 0; i <= 15; ++i) c.xi_radii.push_back(std::pow(10.0, -2.0 + 5.0 * i / 15.0));
  const auto d = static_cast<std::size_t>(dim);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) c.directions.push_back(a == b ? 1.0 : 0.0);
  if (dim > 1) {
    for (int j = 0; j < n_random; ++j) {
      RngStream rng(seed, static_cast<std::uint64_t>(j), 0, 5);
      std::vector<double> v(d);
      for (auto& x : v) x = rng.normal();
      const double n = norm(v);
      for (auto x : v) c.directions.push_back(x / n);
    }
  }
  return c;
}

void LndProbeConfig::validate(int dim) const {
  if (t_grid.empty() || s_fractions.empty() || xi_radii.empty() || directions.empty())
    throw ConfigError("LND probe grids must be nonempty");
  for (double t : t_grid)
    if (!(t > 0.0)) throw ConfigError("LND horizons must be positive");
  for (double f : s_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("LND s fractions must lie in (0,1]");
  for (double r : xi_radii)
    if (!(r > 0.0)) throw ConfigError("LND radii must be positive");
  if (directions.size() % static_cast<std::size_t>(dim)) throw ConfigError("LND directions do not match the dimension");
  for (std::size_t i = 0; i < directions.size(); i += static_cast<std::size_t>(dim)) {
    const double n = norm(std::span<const double>(directions.data() + i, static_cast<std::size_t>(dim)));
    if (std::abs(n - 1.0) > 1e-9) throw ConfigError("LND directions must be unit vectors");
  }
}

double lnd_ratio(const VolterraKernel& kernel, const LevyModel& model, double s, double t,
                 std::span<const double> xi, double zeta, double alpha) {
  if (!(0.0 <= s && s < t) || t > kernel.T_max * (1.0 + 1e-12)) throw DomainError("LND ratio needs 0 <= s < t <= T_max");
  const double r = norm(xi);
  if (r == 0.0) throw DomainError("LND ratio needs xi != 0");
  const double h = t - s;
  return integrated_exponent(kernel, model, xi, h) / (std::pow(h, zeta) * std::pow(r, alpha));
}

LndInfimum lnd_infimum(const VolterraKernel& kernel, const LevyModel& model, const LndProbeConfig& cfg) {
  cfg.validate(model.dim);
  const auto T = build_table(kernel, model, cfg);
  return infimum_from(kernel, model, cfg, T, cfg.zeta, cfg.alpha, true);
}

double min_admissible_zeta(const VolterraKernel& kernel, const LevyModel& model, double alpha, LndProbeConfig cfg,
                           double threshold, double zeta_lo, double zeta_hi) {
  cfg.validate(model.dim);
  if (!(zeta_lo < zeta_hi)) throw ConfigError("zeta search interval is empty");
  const auto T = build_table(kernel, model, cfg);
  const auto ok = [&](double z) {
    const auto inf = infimum_from(kernel, model, cfg, T, z, alpha, true);
    return inf.value >= threshold && inf.decay_slope <= cfg.slope_tol;
  };
  if (ok(zeta_lo)) return zeta_lo;
  if (!ok(zeta_hi)) throw NotFoundError("no admissible zeta in the search interval");
  double lo = zeta_lo, hi = zeta_hi;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace vlab
