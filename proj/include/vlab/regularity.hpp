#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vlab/lattice.hpp"
#include "vlab/pathsim.hpp"

namespace vlab {

struct SpatialFitOptions {
  int p = 2;
  // fit window as fractions of the resolved cutoff
  double fit_lo = 0.125;
  double fit_hi = 0.5;
  // subtract the diagonal sum_r dt_r^2 from E|mu_hat|^2 (p = 2 only)
  bool self_term = true;
  // shrink the cutoff dyadically until E|mu_hat(cutoff/2)|^2 >= floor_factor * diagonal
  bool auto_cutoff = true;
  double floor_factor = 10.0;
  int bins_per_octave = 8;
  std::size_t min_replicas = 100;
  std::size_t n_boot = 200;
  std::uint64_t boot_seed = 7;
  double level = 0.95;
  double min_r2 = 0.9;
};

struct SpatialRegularity {
  double lambda_hat = 0.0;
  double kappa_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double r2 = 0.0;
  double cutoff = 0.0;
  std::vector<double> xi;      // bin centres used in the fit
  std::vector<double> moment;  // E[|mu_hat|^p]^{1/p} at those centres
};

SpatialRegularity estimate_spatial_regularity(std::span<const SamplePath> ensemble, double s, double t,
                                              const FreqLattice& lattice, const SpatialFitOptions& opts = {});

struct TimeFitOptions {
  int p = 2;
  std::size_t max_windows = 8;
  bool self_term = true;
  std::size_t n_boot = 200;
  std::uint64_t boot_seed = 11;
  double level = 0.95;
  double min_r2 = 0.9;
};

struct TimeRegularity {
  double gamma_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double r2 = 0.0;
  std::vector<double> lags;
  std::vector<double> norms;  // E[||mu_{s,s+lag}||_{H^kappa}^p]^{1/p}
};

// Windows [s, s + lag) start at 0 and do not overlap; lags must be multiples of
// the (uniform) grid step.
TimeRegularity estimate_time_regularity(std::span<const SamplePath> ensemble, double kappa,
                                        const FreqLattice& lattice, std::span<const double> lags,
                                        const TimeFitOptions& opts = {});

struct MomentBoundOptions {
  int p = 2;
  std::size_t max_windows = 8;
  bool self_term = true;
  double max_ratio = 10.0;
};

struct MomentBoundReport {
  double lambda = 0.0;
  double gamma = 0.0;
  double log_c = 0.0;
  std::vector<double> xi;
  std::vector<double> lags;
  std::vector<double> moments;  // xi-major, xi.size() x lags.size()
  std::vector<double> ratios;
  double max_over_median = 0.0;
  bool pass = false;
  std::vector<std::string> violations;
};

// Joint fit log m = c - (lambda/2) log(1+xi^2) + gamma log lag, then the spread
// of m over the fitted envelope. xi values are radii along the first axis.
MomentBoundReport mc_moment_bound_check(std::span<const SamplePath> ensemble, std::span<const double> xi,
                                        std::span<const double> lags, const MomentBoundOptions& opts = {});

}  // namespace vlab
