#pragma once

#include <functional>

namespace vlab {

struct QuadratureOptions {
  double rel_tol = 1e-12;
  std::size_t max_refinements = 15;
};

// ∫_0^h f(u) du for f possibly singular (power or log) at u = 0. f receives the
// distance to the left endpoint directly, so no precision is lost near u = 0.
double integrate_left_singular(const std::function<double(double)>& f, double h,
                               const QuadratureOptions& opts = {});

// ∫_a^b f(v) dv with b possibly +inf; exp-sinh on half lines, tanh-sinh otherwise.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

// Composite Gauss-Legendre on a geometrically graded mesh toward u = 0; an
// independent route used by tests.
double integrate_graded(const std::function<double(double)>& f, double h, int panels, int q = 3);

}  // namespace vlab
