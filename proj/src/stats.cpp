#include "vlab/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "vlab/errors.hpp"
#include "vlab/rng.hpp"

namespace vlab {

void Welford::push(double x) {
  ++n;
  const double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void Welford::merge(const Welford& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(o.n);
  const double d = o.mean - mean;
  mean += d * nb / (na + nb);
  m2 += o.m2 + d * d * na * nb / (na + nb);
  n += o.n;
}

double Welford::variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

double Welford::std_err() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitError("line fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw FitError("line fit with degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.slope_se = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return f;
}

std::vector<double> least_squares(std::span<const double> X, std::span<const double> y, std::size_t k) {
  const std::size_t n = y.size();
  if (X.size() != n * k || n < k) throw FitError("least squares shape mismatch");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
      X.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Eigen::Map<const Eigen::VectorXd> b(y.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(b);
  return {beta.data(), beta.data() + beta.size()};
}

Interval bootstrap_percentile(std::size_t n, std::size_t n_boot, std::uint64_t seed, double level,
                              const std::function<double(std::span<const std::size_t>)>& stat) {
  if (n == 0 || n_boot == 0) throw FitError("empty bootstrap");
  std::vector<double> vals;
  vals.reserve(n_boot);
  std::vector<std::size_t> idx(n);
  for (std::size_t b = 0; b < n_boot; ++b) {
    RngStream rng(seed, b, 0, 7);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.next_u64() % n);
    vals.push_back(stat(idx));
  }
  std::sort(vals.begin(), vals.end());
  const double a = 0.5 * (1.0 - level);
  return {quantile_sorted(vals, a), quantile_sorted(vals, 1.0 - a)};
}

double quantile_sorted(std::span<const double> s, double q) {
  if (s.empty()) throw FitError("quantile of empty sample");
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= s.size()) return s.back();
  const double f = pos - static_cast<double>(i);
  return s[i] * (1.0 - f) + s[i + 1] * f;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace vlab
