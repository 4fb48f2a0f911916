#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "vlab/drift.hpp"
#include "vlab/pathsim.hpp"

namespace vlab {

// Two-parameter increment field Gamma_{t_i, t_j}(x) on fixed time marks.
class GammaField {
 public:
  virtual ~GammaField() = default;
  virtual const std::vector<double>& marks() const = 0;
  virtual int dim() const = 0;
  virtual void increment(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const = 0;
  // d x d row-major, entry (r, c) = d Gamma_r / d x_c
  virtual void jacobian(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const = 0;
};

class AnalyticGamma : public GammaField {
 public:
  using Fn = std::function<void(double s, double t, std::span<const double> x, std::span<double> out)>;
  AnalyticGamma(std::vector<double> marks, int dim, Fn gamma, Fn jacobian);

  const std::vector<double>& marks() const override { return marks_; }
  int dim() const override { return dim_; }
  void increment(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const override;
  void jacobian(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const override;

 private:
  std::vector<double> marks_;
  int dim_;
  Fn gamma_, jac_;
};

struct GammaBuildOptions;

struct GammaReport {
  double gamma = 0.5;
  // sup ||D^k Gamma_{s,t}||_inf / |t-s|^gamma over the probed pairs, k = 0, 1, 2
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double holder_c2 = 0.0;  // c0 + c1 + c2
  double bound = 0.0;
  bool pass = false;
};

// Cumulative anchors A_t = b * Lbar_{0,t} and spectral gradients on a torus
// grid; off-grid values by tensor cubic Lagrange interpolation.
class LatticeGamma : public GammaField {
 public:
  const std::vector<double>& marks() const override { return marks_; }
  int dim() const override { return dim_; }
  void increment(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const override;
  void jacobian(std::size_t i, std::size_t j, std::span<const double> x, std::span<double> out) const override;

  const GammaReport& report() const { return report_; }
  int grid_points() const { return m_; }
  double period() const { return period_; }
  // anchor component c at mark i, grid values
  std::span<const double> anchor(std::size_t i, int c = 0) const;

 private:
  friend LatticeGamma build_gamma_from_drift(std::span<const SpectralDrift>, const SamplePath&, const GammaBuildOptions&);
  double interp(const double* field, std::span<const double> x) const;

  std::vector<double> marks_;
  int dim_ = 1;
  int m_ = 0;
  double period_ = 1.0;
  double lo_ = 0.0;
  std::size_t npts_ = 0;
  std::vector<double> anchors_;  // mark x component x grid
  std::vector<double> grads_;    // mark x (component, axis) x grid
  GammaReport report_;
};

struct GammaBuildOptions {
  int m = 256;              // spatial points per axis
  std::size_t stride = 1;   // one mark every `stride` path steps
  double gamma = 0.5;
  double bound = 1e8;       // cap on the measured C^gamma_T C^2 constant
  bool verify = true;
  std::size_t windows_per_lag = 16;
};

// One drift component per spatial dimension; all share the lattice.
LatticeGamma build_gamma_from_drift(std::span<const SpectralDrift> b, const SamplePath& path,
                                    const GammaBuildOptions& opts = {});

struct SewingOptions {
  int depth = -1;  // -1: as deep as the mark count allows
  bool certify = true;
  double min_rate = 1.0352649238413776;  // 2^0.05
};

struct SewingResult {
  std::vector<double> cumulative;    // deepest level, (marks) x dim
  std::vector<double> level_totals;  // (depth+1) x dim, over the whole horizon
  std::vector<double> deltas;        // depth entries, max-norm of successive totals
  std::vector<double> compensated;   // geometric tail-corrected total, dim
  double rate = 0.0;                 // measured level contraction (inf when exact)
  bool exact = false;
};

// Riemann sums sum Gamma_{u,v}(y_u) over dyadic sub-partitions of the marks;
// level l uses index stride 2^(depth - l). y is (marks) x dim.
SewingResult sewing_integral(const GammaField& gamma, std::span<const double> y, const SewingOptions& opts = {});

struct PicardConfig {
  std::size_t max_iter = 500;
  double tol = 1e-8;
  std::size_t window = 0;  // marks per window; 0 means the whole horizon
  double max_contraction = 0.5;
  // start each window from theta_a + ramp (t - t_a) instead of theta_a
  double ramp = 0.0;
};

struct YoungSolution {
  std::vector<double> times;
  int dim = 1;
  std::vector<double> theta;  // (marks) x dim
  std::vector<std::size_t> window_starts;
  std::vector<double> contraction;
  std::vector<std::size_t> iterations;
  double residual = 0.0;
};

YoungSolution picard_solve(const GammaField& gamma, std::span<const double> xi0, const PicardConfig& cfg = {});
YoungSolution euler_solve(const GammaField& gamma, std::span<const double> xi0);

// max_i |theta_i - xi - sum_{k<i} Gamma_{k,k+1}(theta_k)|
double fixed_point_residual(const GammaField& gamma, const YoungSolution& sol);

// x = theta + z at the marks
std::vector<double> reconstruct(const YoungSolution& sol, const SamplePath& path);

struct FlowDerivative {
  std::vector<double> J;  // (marks) x dim x dim
  std::vector<std::size_t> iterations;
};

// Linear equation dJ = grad Gamma_{dr}(theta_r) J, J_0 = I, on the solution's windows.
FlowDerivative flow_derivative(const GammaField& gamma, const YoungSolution& sol, const PicardConfig& cfg = {});

// sup_{s != t} |f_t - f_s| / |t - s|^g over all mark pairs; f is (marks) x dim.
double holder_norm(std::span<const double> times, std::span<const double> f, int dim, double g);

}  // namespace vlab
