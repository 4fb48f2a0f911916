#include "vlab/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "vlab/errors.hpp"

namespace vlab {

double integrate_left_singular(const std::function<double(double)>& f, double h,
                               const QuadratureOptions& opts) {
  if (!(h > 0.0)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator(opts.max_refinements);
  double err = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    // on [0,1] boost's error estimate is commensurate with the integral; on [0,h] it is not
    value = h * integrator.integrate([&](double x) { return f(h * x); }, 0.0, 1.0, opts.rel_tol, &err, &l1);
  } catch (const std::exception& e) {
    throw QuadratureError(std::string("tanh-sinh failed: ") + e.what());
  }
  if (!std::isfinite(value)) throw QuadratureError("tanh-sinh returned a non-finite value");
  // boost reports err relative to L1; accept a small slack over the request
  if (l1 > 0.0 && err > 1e3 * opts.rel_tol * l1 && err > 1e-300)
    throw QuadratureError("tanh-sinh did not reach the requested accuracy");
  return value;
}

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  double value = 0.0;
  double err = 0.0;
  double l1 = 0.0;
  try {
    if (std::isinf(b)) {
      boost::math::quadrature::exp_sinh<double> integrator(opts.max_refinements);
      value = integrator.integrate(f, a, b, opts.rel_tol, &err, &l1);
    } else {
      boost::math::quadrature::tanh_sinh<double> integrator(opts.max_refinements);
      value = integrator.integrate(f, a, b, opts.rel_tol, &err, &l1);
    }
  } catch (const std::exception& e) {
    throw QuadratureError(std::string("double-exponential quadrature failed: ") + e.what());
  }
  if (!std::isfinite(value)) throw QuadratureError("quadrature returned a non-finite value");
  if (l1 > 0.0 && err > 1e3 * opts.rel_tol * l1 && err > 1e-300)
    throw QuadratureError("quadrature did not reach the requested accuracy");
  return value;
}

double integrate_graded(const std::function<double(double)>& f, double h, int panels, int q) {
  using Gauss = boost::math::quadrature::gauss<double, 30>;
  double total = 0.0;
  double prev = 0.0;
  for (int m = 1; m <= panels; ++m) {
    const double node = h * std::pow(static_cast<double>(m) / panels, q);
    total += Gauss::integrate(f, prev, node);
    prev = node;
  }
  return total;
}

}  // namespace vlab
