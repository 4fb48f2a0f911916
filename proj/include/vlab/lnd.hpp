#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vlab/kernels.hpp"
#include "vlab/levy.hpp"

namespace vlab {

struct LndProbeConfig {
  std::vector<double> t_grid;       // small horizons
  std::vector<double> s_fractions;  // (t - s) / t in (0, 1]
  std::vector<double> xi_radii;
  std::vector<double> directions;   // unit vectors, row-major n x dim
  double zeta = 1.0;
  double alpha = 2.0;
  // admissibility also requires the per-horizon minima not to decay faster
  // than t^slope_tol as t shrinks
  double slope_tol = 1e-4;
  int slope_levels = 4;

  // Geometric grids down to t_min; directions are the axes plus n_random seeded unit vectors.
  static LndProbeConfig standard(int dim, double t_max, double t_min = 1e-4, int n_random = 8,
                                 std::uint64_t seed = 3);
  void validate(int dim) const;
};

// ∫_s^t psi(k(t,r) xi) dr / ((t-s)^zeta |xi|^alpha)
double lnd_ratio(const VolterraKernel& kernel, const LevyModel& model, double s, double t,
                 std::span<const double> xi, double zeta, double alpha);

struct LndInfimum {
  double value = 0.0;
  double t = 0.0;
  double s = 0.0;
  double radius = 0.0;
  std::size_t direction = 0;
  // minima restricted to |xi| < 1 and |xi| >= 1
  double small_radius_inf = 0.0;
  double large_radius_inf = 0.0;
  std::vector<double> per_t;  // minimum at each t_grid entry
  double decay_slope = 0.0;   // log-log slope of per_t over the smallest horizons
};

LndInfimum lnd_infimum(const VolterraKernel& kernel, const LevyModel& model, const LndProbeConfig& cfg);

// Smallest zeta in [zeta_lo, zeta_hi] (to 1e-3) whose infimum is >= threshold
// and whose decay slope is <= slope_tol.
double min_admissible_zeta(const VolterraKernel& kernel, const LevyModel& model, double alpha,
                           LndProbeConfig cfg, double threshold = 1e-3, double zeta_lo = 0.01,
                           double zeta_hi = 2.0);

}  // namespace vlab
