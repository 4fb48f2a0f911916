#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "vlab/errors.hpp"
#include "vlab/radial_table.hpp"

namespace vlab {

namespace {

using boost::math::quadrature::ooura_fourier_cos;
using boost::math::quadrature::ooura_fourier_sin;
constexpr double kPi = std::numbers::pi;

struct Transforms {
  explicit Transforms(const RadialLawSpec& s) : spec(s), sin_(1e-11), cos_(1e-11) {}

  double phi(double y) const { return std::exp(-spec.exponent(y)); }
  double one_minus_phi(double y) const { return -std::expm1(-spec.exponent(y)); }

  double os(const std::function<double(double)>& f, double w) { return sin_.integrate(f, w).first; }
  double oc(const std::function<double(double)>& f, double w) { return cos_.integrate(f, w).first; }

  double tail(double x) {
    if (x <= 0.0) return 1.0;
    const auto g = [this](double y) { return one_minus_phi(y) / y; };
    const auto p = [this](double y) { return phi(y); };
    switch (spec.dim) {
      case 1:
        return 2.0 / kPi * os(g, x);
      case 3:
        return 2.0 / kPi * (os(g, x) + x * oc(p, x));
    }
    throw ConfigError("radial law tables support dim 1 and 3");
  }

  double density(double x) {
    const auto p = [this](double y) { return phi(y); };
    const auto yp = [this](double y) { return y * phi(y); };
    switch (spec.dim) {
      case 1:
        if (x <= 0.0) {
          boost::math::quadrature::exp_sinh<double> es;
          return 2.0 / kPi * es.integrate(p, 0.0, std::numeric_limits<double>::infinity());
        }
        return 2.0 / kPi * oc(p, x);
      case 3:
        if (x <= 0.0) return 0.0;
        return 2.0 / kPi * x * os(yp, x);
    }
    throw ConfigError("radial law tables support dim 1 and 3");
  }

  RadialLawSpec spec;
  ooura_fourier_sin<double> sin_;
  ooura_fourier_cos<double> cos_;
};

}  // namespace

RadialLawTable::RadialLawTable(RadialLawSpec spec) : spec_(std::move(spec)) {
  if (spec_.dim != 1 && spec_.dim != 3) throw ConfigError("radial law tables support dim 1 and 3");
  Transforms tr(spec_);
  double xmax = spec_.x_scale;
  if (spec_.tail_asymptote) {
    while (spec_.tail_asymptote(xmax) > spec_.tail_floor && xmax < 1e200) xmax *= 2.0;
  } else {
    while (tr.tail(xmax) > spec_.tail_floor && xmax < 1e200) xmax *= 2.0;
  }
  const double vmax = std::asinh(xmax / spec_.x_scale);
  const auto n = static_cast<std::size_t>(std::ceil(vmax * spec_.nodes_per_unit));
  vs_.resize(n + 1);
  xs_.resize(n + 1);
  G_.resize(n + 1);
  dG_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double v = vmax * static_cast<double>(i) / static_cast<double>(n);
    const double x = spec_.x_scale * std::sinh(v);
    vs_[i] = v;
    xs_[i] = x;
    G_[i] = 1.0 - tr.tail(x);
    dG_[i] = tr.density(x) * spec_.x_scale * std::cosh(v);
  }
  G_[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) G_[i] = std::max(G_[i], G_[i - 1]);
  if (spec_.tail_asymptote) {
    const double a = spec_.tail_asymptote(xs_.back());
    tail_match_ = a > 0.0 ? (1.0 - G_.back()) / a : 1.0;
  }
}

double RadialLawTable::tail_exact(double x) const {
  Transforms tr(spec_);
  return tr.tail(x);
}

double RadialLawTable::density_exact(double x) const {
  Transforms tr(spec_);
  return tr.density(x);
}

double RadialLawTable::hermite(std::size_t i, double v) const {
  const double h = vs_[i + 1] - vs_[i];
  const double s = (v - vs_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * G_[i] + (s3 - 2 * s2 + s) * h * dG_[i] +
         (-2 * s3 + 3 * s2) * G_[i + 1] + (s3 - s2) * h * dG_[i + 1];
}

double RadialLawTable::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= xs_.back()) {
    if (!spec_.tail_asymptote) return 1.0;
    return 1.0 - tail_match_ * spec_.tail_asymptote(x);
  }
  const double v = std::asinh(x / spec_.x_scale);
  auto it = std::upper_bound(vs_.begin(), vs_.end(), v);
  const std::size_t i = static_cast<std::size_t>(std::distance(vs_.begin(), it)) - 1;
  return std::clamp(hermite(i, v), 0.0, 1.0);
}

double RadialLawTable::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= G_.back()) {
    if (!spec_.tail_asymptote) return xs_.back();
    const double target = 1.0 - u;
    double lo = xs_.back();
    double hi = 2.0 * lo;
    while (tail_match_ * spec_.tail_asymptote(hi) > target && hi < 1e300) {
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-14; ++it) {
      const double mid = std::sqrt(lo * hi);
      if (tail_match_ * spec_.tail_asymptote(mid) > target)
        lo = mid;
      else
        hi = mid;
    }
    return std::sqrt(lo * hi);
  }
  auto it = std::upper_bound(G_.begin(), G_.end(), u);
  std::size_t i = static_cast<std::size_t>(std::distance(G_.begin(), it)) - 1;
  while (i + 1 < G_.size() && G_[i + 1] == G_[i]) ++i;
  if (i + 1 >= G_.size()) return xs_.back();
  double lo = vs_[i];
  double hi = vs_[i + 1];
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (hermite(i, mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return spec_.x_scale * std::sinh(0.5 * (lo + hi));
}

std::shared_ptr<const RadialLawTable> RadialLawTable::log_modified(double alpha, double dt,
                                                                    int dim, double* xi_star) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, int>, std::pair<std::shared_ptr<const RadialLawTable>, double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(alpha, dt, dim);
  if (auto it = cache.find(key); it != cache.end()) {
    if (xi_star) *xi_star = it->second.second;
    return it->second.first;
  }
  const auto psi_r = [alpha](double log_rho) {
    const double rho = std::exp(log_rho);
    const double lg = log_rho > 30.0 ? log_rho + std::log1p(2.0 * std::exp(-log_rho)) : std::log(2.0 + rho);
    return std::exp(alpha * log_rho) * lg;
  };
  double lo = -300.0;
  double hi = 300.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (dt * psi_r(mid) < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  const double log_xs = 0.5 * (lo + hi);
  const double d = dim;
  const double K = std::pow(2.0, alpha) * std::tgamma(0.5 * (d + alpha)) /
                   (std::tgamma(1.0 - 0.5 * alpha) * std::tgamma(0.5 * d));
  RadialLawSpec spec;
  spec.dim = dim;
  spec.exponent = [=](double y) { return y <= 0.0 ? 0.0 : dt * psi_r(log_xs + std::log(y)); };
  spec.tail_asymptote = [=](double x) { return K * dt * psi_r(log_xs - std::log(x)); };
  spec.tail_floor = 1e-6;
  auto table = std::make_shared<const RadialLawTable>(std::move(spec));
  cache.emplace(key, std::make_pair(table, std::exp(log_xs)));
  if (xi_star) *xi_star = std::exp(log_xs);
  return table;
}

}  // namespace vlab
