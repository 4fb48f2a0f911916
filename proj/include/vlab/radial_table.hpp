#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace vlab {

// Radial law of an isotropic variable in R^d (d = 1 or 3) whose characteristic
// function is exp(-e(|xi|)), tabulated by Fourier inversion. Units are whatever
// e is expressed in; callers rescale.
struct RadialLawSpec {
  int dim = 1;
  std::function<double(double)> exponent;  // e(y) >= 0, e(0) = 0
  // P(R > x) for large x; used beyond the table, matched at the last node
  std::function<double(double)> tail_asymptote;
  double tail_floor = 1e-6;
  double x_scale = 1.0;
  int nodes_per_unit = 64;
};

class RadialLawTable {
 public:
  explicit RadialLawTable(RadialLawSpec spec);

  // Freshly computed (not interpolated) tail P(R > x) and density of R.
  double tail_exact(double x) const;
  double density_exact(double x) const;

  double cdf(double x) const;
  double quantile(double u) const;
  double x_max() const { return xs_.back(); }

  static std::shared_ptr<const RadialLawTable> log_modified(double alpha, double dt, int dim,
                                                            double* xi_star);

 private:
  double hermite(std::size_t i, double v) const;

  RadialLawSpec spec_;
  std::vector<double> vs_;
  std::vector<double> xs_;
  std::vector<double> G_;
  std::vector<double> dG_;  // dG/dv
  double tail_match_ = 1.0;
};

}  // namespace vlab
