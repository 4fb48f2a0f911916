#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace vlab {

// Streaming mean/variance; merge is associative so per-thread partials can be reduced.
struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x);
  void merge(const Welford& o);
  double variance() const;  // unbiased
  double std_err() const;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Ordinary least squares y ~ X beta; X is row-major n x k.
std::vector<double> least_squares(std::span<const double> X, std::span<const double> y, std::size_t k);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap over n units. stat receives resampled unit indices.
Interval bootstrap_percentile(std::size_t n, std::size_t n_boot, std::uint64_t seed, double level,
                              const std::function<double(std::span<const std::size_t>)>& stat);

double quantile_sorted(std::span<const double> sorted, double q);
double median(std::vector<double> v);
double normal_cdf(double x);

}  // namespace vlab
