#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vlab/rng.hpp"

namespace vlab {

enum class LevyFamily { BrownianIso, StableIso, StableComponentwise, StableLogModified };

struct LevyModel {
  LevyFamily family = LevyFamily::BrownianIso;
  double sigma = 1.0;
  double alpha = 2.0;
  double c_alpha = 1.0;
  int dim = 1;

  static LevyModel brownian(double sigma = 1.0, int dim = 1);
  static LevyModel stable_iso(double alpha, double c_alpha = 1.0, int dim = 1);
  static LevyModel stable_componentwise(double alpha, double c_alpha = 1.0, int dim = 1);
  static LevyModel log_modified(double alpha, int dim = 1);

  void validate() const;
  // Stability index used for energy matching: 2 for Brownian, alpha otherwise.
  double index() const;
  // psi(lambda xi) = lambda^index psi(xi) exactly
  bool homogeneous() const;
  std::string id() const;
};

// psi(xi) with E exp(i<xi, L_t>) = exp(-t psi(xi)). Brownian uses sigma^2 |xi|^2 / 2.
double char_exponent(const LevyModel& m, std::span<const double> xi);

// psi(exp(log_scale) * xi), safe against overflow of the scale factor.
double char_exponent_scaled(const LevyModel& m, double log_scale, std::span<const double> xi);

// Symmetric standard stable with E exp(i xi X) = exp(-|xi|^alpha); alpha = 2 gives N(0,2).
double sample_stable_1d(double alpha, RngStream& rng);

// Positive stable with Laplace transform E exp(-s A) = exp(-s^a), a in (0,1).
double sample_positive_stable(double a, RngStream& rng);

class RadialLawTable;

// Increment sampler for a fixed (model, dt): E exp(i<xi, dL>) = exp(-dt psi(xi)).
class IncrementSampler {
 public:
  IncrementSampler(const LevyModel& model, double dt);
  void draw(RngStream& rng, std::span<double> out) const;
  const LevyModel& model() const { return model_; }
  double dt() const { return dt_; }

 private:
  LevyModel model_;
  double dt_;
  double scale_;
  std::shared_ptr<const RadialLawTable> table_;
};

std::vector<double> sample_increment(const LevyModel& model, double dt, RngStream& rng);

}  // namespace vlab
