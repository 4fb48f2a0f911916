#include "vlab/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vlab/errors.hpp"
#include "vlab/quadrature.hpp"

namespace vlab {

VolterraKernel VolterraKernel::constant(double T_max) {
  VolterraKernel k;
  k.family = KernelFamily::Constant;
  k.T_max = T_max;
  k.validate();
  return k;
}

VolterraKernel VolterraKernel::fractional_rl(double H, double alpha_ref, double T_max) {
  VolterraKernel k;
  k.family = KernelFamily::FractionalRL;
  k.H = H;
  k.alpha_ref = alpha_ref;
  k.T_max = T_max;
  k.validate();
  return k;
}

VolterraKernel VolterraKernel::exponential(double a, double T_max) {
  VolterraKernel k;
  k.family = KernelFamily::Exponential;
  k.a = a;
  k.T_max = T_max;
  k.validate();
  return k;
}

VolterraKernel VolterraKernel::log_singular(double p, double alpha_ref, double T_max) {
  VolterraKernel k;
  k.family = KernelFamily::LogSingular;
  k.p = p;
  k.alpha_ref = alpha_ref;
  k.T_max = T_max;
  k.validate();
  return k;
}

void VolterraKernel::validate() const {
  if (!(T_max > 0.0)) throw ConfigError("kernel T_max must be positive");
  switch (family) {
    case KernelFamily::Constant:
      break;
    case KernelFamily::FractionalRL:
      if (!(H > 0.0 && H < 1.0)) throw ConfigError("FractionalRL needs H in (0,1)");
      if (!(alpha_ref > 0.0 && alpha_ref <= 2.0))
        throw ConfigError("FractionalRL needs alpha_ref in (0,2]");
      break;
    case KernelFamily::Exponential:
      if (!(a > 0.0)) throw ConfigError("Exponential kernel needs a > 0");
      break;
    case KernelFamily::LogSingular:
      if (!(alpha_ref > 0.0 && alpha_ref <= 2.0))
        throw ConfigError("LogSingular needs alpha_ref in (0,2]");
      if (!(p > 1.0 / alpha_ref)) throw ConfigError("LogSingular needs p > 1/alpha_ref");
      if (!(T_max < 1.0)) throw ConfigError("LogSingular is only defined for T_max < 1");
      break;
  }
}

std::string VolterraKernel::id() const {
  std::ostringstream os;
  os.precision(6);
  switch (family) {
    case KernelFamily::Constant:
      os << "constant";
      break;
    case KernelFamily::FractionalRL:
      os << "fractional_rl(H=" << H << ",alpha_ref=" << alpha_ref << ")";
      break;
    case KernelFamily::Exponential:
      os << "exponential(a=" << a << ")";
      break;
    case KernelFamily::LogSingular:
      os << "log_singular(p=" << p << ",alpha_ref=" << alpha_ref << ")";
      break;
  }
  os << "[T=" << T_max << "]";
  return os.str();
}

double log_kernel_lag(const VolterraKernel& k, double u) {
  switch (k.family) {
    case KernelFamily::Constant:
      return 0.0;
    case KernelFamily::FractionalRL:
      return (k.H - 1.0 / k.alpha_ref) * std::log(u);
    case KernelFamily::Exponential:
      return -k.a * u;
    case KernelFamily::LogSingular: {
      const double lu = std::log(u);
      return -lu / k.alpha_ref - k.p * std::log(-lu);
    }
  }
  return 0.0;
}

double eval_kernel_lag(const VolterraKernel& k, double u) {
  if (u == 0.0) {
    switch (k.family) {
      case KernelFamily::Constant:
      case KernelFamily::Exponential:
        return 1.0;
      case KernelFamily::FractionalRL:
        if (k.H - 1.0 / k.alpha_ref >= 0.0) return k.H - 1.0 / k.alpha_ref == 0.0 ? 1.0 : 0.0;
        return std::numeric_limits<double>::infinity();
      case KernelFamily::LogSingular:
        return std::numeric_limits<double>::infinity();
    }
  }
  if (k.family == KernelFamily::Constant) return 1.0;
  if (k.family == KernelFamily::Exponential) return std::exp(-k.a * u);
  return std::exp(log_kernel_lag(k, u));
}

double eval_kernel(const VolterraKernel& k, double t, double s) {
  k.validate();
  if (!(s >= 0.0) || !(s < t)) throw DomainError("eval_kernel needs 0 <= s < t");
  if (t > k.T_max) throw DomainError("eval_kernel: t exceeds the kernel horizon T_max");
  return eval_kernel_lag(k, t - s);
}

namespace {

double power_difference(double u1, double u2, double c) {
  // u2^c - u1^c for c > 0 without losing digits when the two are close
  if (u1 == 0.0) return std::pow(u2, c);
  const double l1 = c * std::log(u1);
  const double l2 = c * std::log(u2);
  return std::exp(l1) * std::expm1(l2 - l1);
}

double energy_by_quadrature(const VolterraKernel& k, double alpha, double u1, double u2) {
  if (k.family == KernelFamily::LogSingular) {
    // u = exp(-e^w)
    const auto g = [&](double w) {
      const double v = std::exp(w);
      if (std::isinf(v)) return 0.0;
      return std::exp((alpha / k.alpha_ref - 1.0) * v + (1.0 - alpha * k.p) * w);
    };
    const double hi = u1 == 0.0 ? std::numeric_limits<double>::infinity() : std::log(-std::log(u1));
    return integrate_interval(g, std::log(-std::log(u2)), hi);
  }
  auto f = [&](double u) {
    const double lk = alpha * log_kernel_lag(k, u1 + u);
    return std::exp(lk);
  };
  return integrate_left_singular(f, u2 - u1);
}

}  // namespace

double lag_alpha_energy(const VolterraKernel& k, double alpha, double u1, double u2) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0,2]");
  if (!(u1 >= 0.0) || !(u2 > u1)) throw DomainError("lag_alpha_energy needs 0 <= u1 < u2");
  if (u2 > k.T_max * (1.0 + 1e-12)) throw DomainError("lag exceeds the kernel horizon T_max");
  switch (k.family) {
    case KernelFamily::Constant:
      return u2 - u1;
    case KernelFamily::FractionalRL: {
      const double c = (k.H - 1.0 / k.alpha_ref) * alpha + 1.0;
      if (c <= 0.0) {
        if (u1 == 0.0) throw DomainError("FractionalRL kernel is not in L^alpha near the diagonal");
        if (c == 0.0) return std::log(u2 / u1);
        return (std::pow(u2, c) - std::pow(u1, c)) / c;
      }
      return power_difference(u1, u2, c) / c;
    }
    case KernelFamily::Exponential: {
      const double r = k.a * alpha;
      return std::exp(-r * u1) * (-std::expm1(-r * (u2 - u1))) / r;
    }
    case KernelFamily::LogSingular: {
      if (alpha == k.alpha_ref) {
        const double q = k.p * alpha;
        const double v2 = -std::log(u2);
        if (u1 == 0.0) return std::pow(v2, 1.0 - q) / (q - 1.0);
        const double v1 = -std::log(u1);
        // v2^{1-q} - v1^{1-q} with v1 > v2
        return std::pow(v1, 1.0 - q) * std::expm1((1.0 - q) * std::log(v2 / v1)) / (q - 1.0);
      }
      if (alpha > k.alpha_ref && u1 == 0.0)
        throw DomainError("LogSingular kernel is not in L^alpha for alpha > alpha_ref");
      return energy_by_quadrature(k, alpha, u1, u2);
    }
  }
  return 0.0;
}

double kernel_alpha_energy(const VolterraKernel& k, double alpha, double s, double t) {
  k.validate();
  if (!(s >= 0.0) || !(s < t)) throw DomainError("kernel_alpha_energy needs 0 <= s < t");
  if (t > k.T_max) throw DomainError("kernel_alpha_energy: t exceeds T_max");
  return lag_alpha_energy(k, alpha, 0.0, t - s);
}

double kernel_alpha_energy_quadrature(const VolterraKernel& k, double alpha, double s, double t) {
  k.validate();
  if (!(s >= 0.0) || !(s < t)) throw DomainError("kernel_alpha_energy needs 0 <= s < t");
  if (t > k.T_max) throw DomainError("kernel_alpha_energy: t exceeds T_max");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0,2]");
  return energy_by_quadrature(k, alpha, 0.0, t - s);
}

std::vector<double> cell_averaged_weights(const VolterraKernel& k, double alpha, double t,
                                          std::span<const double> grid) {
  if (grid.size() < 2) throw GridError("cell_averaged_weights needs at least one cell");
  if (grid.front() != 0.0 || std::abs(grid.back() - t) > 1e-12 * std::max(1.0, t))
    throw GridError("grid must cover [0,t]");
  std::vector<double> w(grid.size() - 1);
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double dj = grid[j + 1] - grid[j];
    if (!(dj > 0.0)) throw GridError("grid must be strictly increasing");
    const double u1 = std::max(0.0, t - grid[j + 1]);
    const double u2 = t - grid[j];
    w[j] = std::pow(lag_alpha_energy(k, alpha, u1, u2) / dj, 1.0 / alpha);
  }
  return w;
}

}  // namespace vlab
