#include "vlab/levy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vlab/errors.hpp"
#include "vlab/radial_table.hpp"

namespace vlab {

namespace {
constexpr double kPi = std::numbers::pi;

double norm2(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return s;
}
}  // namespace

LevyModel LevyModel::brownian(double sigma, int dim) {
  LevyModel m;
  m.family = LevyFamily::BrownianIso;
  m.sigma = sigma;
  m.alpha = 2.0;
  m.dim = dim;
  m.validate();
  return m;
}

LevyModel LevyModel::stable_iso(double alpha, double c_alpha, int dim) {
  LevyModel m;
  m.family = LevyFamily::StableIso;
  m.alpha = alpha;
  m.c_alpha = c_alpha;
  m.dim = dim;
  m.validate();
  return m;
}

LevyModel LevyModel::stable_componentwise(double alpha, double c_alpha, int dim) {
  LevyModel m = stable_iso(alpha, c_alpha, dim);
  m.family = LevyFamily::StableComponentwise;
  return m;
}

LevyModel LevyModel::log_modified(double alpha, int dim) {
  LevyModel m;
  m.family = LevyFamily::StableLogModified;
  m.alpha = alpha;
  m.dim = dim;
  m.validate();
  return m;
}

void LevyModel::validate() const {
  if (dim < 1) throw ConfigError("Levy model dimension must be positive");
  switch (family) {
    case LevyFamily::BrownianIso:
      if (!(sigma > 0.0)) throw ConfigError("Brownian sigma must be positive");
      break;
    case LevyFamily::StableIso:
    case LevyFamily::StableComponentwise:
      if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("stable alpha must lie in (0,2]");
      if (!(c_alpha > 0.0)) throw ConfigError("c_alpha must be positive");
      break;
    case LevyFamily::StableLogModified:
      if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("log-modified model needs alpha in (0,1)");
      if (dim > 3) throw ConfigError("log-modified sampler supports dim <= 3");
      break;
  }
}

double LevyModel::index() const { return family == LevyFamily::BrownianIso ? 2.0 : alpha; }

bool LevyModel::homogeneous() const { return family != LevyFamily::StableLogModified; }

std::string LevyModel::id() const {
  std::ostringstream os;
  os.precision(6);
  switch (family) {
    case LevyFamily::BrownianIso:
      os << "brownian(sigma=" << sigma << ")";
      break;
    case LevyFamily::StableIso:
      os << "stable_iso(alpha=" << alpha << ",c=" << c_alpha << ")";
      break;
    case LevyFamily::StableComponentwise:
      os << "stable_componentwise(alpha=" << alpha << ",c=" << c_alpha << ")";
      break;
    case LevyFamily::StableLogModified:
      os << "stable_log_modified(alpha=" << alpha << ")";
      break;
  }
  os << "[d=" << dim << "]";
  return os.str();
}

double char_exponent(const LevyModel& m, std::span<const double> xi) {
  return char_exponent_scaled(m, 0.0, xi);
}

double char_exponent_scaled(const LevyModel& m, double log_scale, std::span<const double> xi) {
  constexpr double kMaxLog = 700.0;
  switch (m.family) {
    case LevyFamily::BrownianIso: {
      const double r2 = norm2(xi);
      if (r2 == 0.0) return 0.0;
      const double l = 2.0 * log_scale + std::log(0.5 * m.sigma * m.sigma * r2);
      return std::exp(std::min(l, kMaxLog));
    }
    case LevyFamily::StableIso: {
      const double r2 = norm2(xi);
      if (r2 == 0.0) return 0.0;
      const double l = m.alpha * (log_scale + 0.5 * std::log(r2)) + std::log(m.c_alpha);
      return std::exp(std::min(l, kMaxLog));
    }
    case LevyFamily::StableComponentwise: {
      double s = 0.0;
      for (double v : xi)
        if (v != 0.0) s += std::pow(std::abs(v), m.alpha);
      if (s == 0.0) return 0.0;
      const double l = m.alpha * log_scale + std::log(m.c_alpha * s);
      return std::exp(std::min(l, kMaxLog));
    }
    case LevyFamily::StableLogModified: {
      const double r2 = norm2(xi);
      if (r2 == 0.0) return 0.0;
      const double lr = log_scale + 0.5 * std::log(r2);
      const double lg = lr > 30.0 ? lr + std::log1p(2.0 * std::exp(-lr)) : std::log(2.0 + std::exp(lr));
      return std::exp(std::min(m.alpha * lr + std::log(lg), kMaxLog));
    }
  }
  return 0.0;
}

double sample_stable_1d(double alpha, RngStream& rng) {
  if (alpha == 2.0) return std::sqrt(2.0) * rng.normal();
  const double u = kPi * (rng.uniform() - 0.5);
  if (alpha == 1.0) return std::tan(u);
  const double w = rng.exponential();
  return std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
}

double sample_positive_stable(double a, RngStream& rng) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("positive stable index must lie in (0,1)");
  const double u = kPi * rng.uniform();
  const double e = rng.exponential();
  return std::sin(a * u) / std::pow(std::sin(u), 1.0 / a) *
         std::pow(std::sin((1.0 - a) * u) / e, (1.0 - a) / a);
}

IncrementSampler::IncrementSampler(const LevyModel& model, double dt)
    : model_(model), dt_(dt), scale_(1.0) {
  model_.validate();
  if (!(dt > 0.0)) throw DomainError("increment dt must be positive");
  switch (model_.family) {
    case LevyFamily::BrownianIso:
      scale_ = model_.sigma * std::sqrt(dt);
      break;
    case LevyFamily::StableIso:
    case LevyFamily::StableComponentwise:
      scale_ = std::pow(model_.c_alpha * dt, 1.0 / model_.alpha);
      break;
    case LevyFamily::StableLogModified: {
      double xi_star = 1.0;
      // a 2-d isotropic law is the planar projection of the 3-d one with the same radial exponent
      table_ = RadialLawTable::log_modified(model_.alpha, dt, model_.dim == 1 ? 1 : 3, &xi_star);
      scale_ = 1.0 / xi_star;
      break;
    }
  }
}

void IncrementSampler::draw(RngStream& rng, std::span<double> out) const {
  const int d = model_.dim;
  switch (model_.family) {
    case LevyFamily::BrownianIso:
      for (int i = 0; i < d; ++i) out[i] = scale_ * rng.normal();
      return;
    case LevyFamily::StableComponentwise:
      for (int i = 0; i < d; ++i) out[i] = scale_ * sample_stable_1d(model_.alpha, rng);
      return;
    case LevyFamily::StableIso: {
      if (d == 1) {
        out[0] = scale_ * sample_stable_1d(model_.alpha, rng);
        return;
      }
      // sub-Gaussian: sqrt(A) G with A positive (alpha/2)-stable, G ~ N(0, 2I)
      const double amp = model_.alpha == 2.0 ? 1.0 : std::sqrt(sample_positive_stable(0.5 * model_.alpha, rng));
      for (int i = 0; i < d; ++i) out[i] = scale_ * amp * std::sqrt(2.0) * rng.normal();
      return;
    }
    case LevyFamily::StableLogModified: {
      const double r = scale_ * table_->quantile(rng.uniform());
      if (d == 1) {
        out[0] = rng.uniform() < 0.5 ? -r : r;
        return;
      }
      double g[3];
      double n2 = 0.0;
      for (double& v : g) {
        v = rng.normal();
        n2 += v * v;
      }
      const double f = r / std::sqrt(n2);
      for (int i = 0; i < d; ++i) out[i] = f * g[i];
      return;
    }
  }
}

std::vector<double> sample_increment(const LevyModel& model, double dt, RngStream& rng) {
  IncrementSampler s(model, dt);
  std::vector<double> out(static_cast<std::size_t>(model.dim));
  s.draw(rng, out);
  return out;
}

}  // namespace vlab
