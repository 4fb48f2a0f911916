#pragma once

#include <span>
#include <string>
#include <vector>

namespace vlab {

enum class KernelFamily { Constant, FractionalRL, Exponential, LogSingular };

// All implemented kernels are of convolution type k(t,s) = k(t-s).
struct VolterraKernel {
  KernelFamily family = KernelFamily::Constant;
  double H = 0.5;
  double alpha_ref = 2.0;
  double a = 1.0;
  double p = 1.0;
  double T_max = 1.0;

  static VolterraKernel constant(double T_max = 1.0);
  static VolterraKernel fractional_rl(double H, double alpha_ref, double T_max = 1.0);
  static VolterraKernel exponential(double a, double T_max = 1.0);
  static VolterraKernel log_singular(double p, double alpha_ref, double T_max = 0.5);

  void validate() const;
  std::string id() const;
};

// k at lag u = t - s > 0.
double eval_kernel_lag(const VolterraKernel& k, double u);
// log k(u); finite even where k itself would overflow.
double log_kernel_lag(const VolterraKernel& k, double u);

double eval_kernel(const VolterraKernel& k, double t, double s);

// ∫_{u1}^{u2} |k(u)|^alpha du for 0 <= u1 < u2.
double lag_alpha_energy(const VolterraKernel& k, double alpha, double u1, double u2);

double kernel_alpha_energy(const VolterraKernel& k, double alpha, double s, double t);

// Same integral by tanh-sinh quadrature; used where no closed form exists and as a cross-check.
double kernel_alpha_energy_quadrature(const VolterraKernel& k, double alpha, double s, double t);

std::vector<double> cell_averaged_weights(const VolterraKernel& k, double alpha, double t,
                                          std::span<const double> grid);

}  // namespace vlab
