#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vlab/kernels.hpp"
#include "vlab/levy.hpp"
#include "vlab/parallel.hpp"

namespace vlab {

struct PathMeta {
  std::string kernel_id;
  std::string model_id;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

struct SamplePath {
  std::vector<double> times;
  int dim = 1;
  std::vector<double> values;  // row-major, times.size() x dim
  PathMeta meta;

  std::size_t size() const { return times.size(); }
  double at(std::size_t i, int k = 0) const { return values[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)]; }
  std::span<const double> point(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  // index of t in times, or GridError
  std::size_t index_of(double t) const;
};

std::vector<double> uniform_grid(double T, std::size_t steps);

enum class ConvolutionMethod { Auto, Direct, FFT };

struct SimulationOptions {
  ConvolutionMethod method = ConvolutionMethod::Auto;
  std::size_t fft_threshold = 512;
  // cap on weight/accumulation work for the O(N^2) routes, in multiply-adds
  double work_cap = 4e10;
};

// Precomputes the energy-matched weights for one (kernel, model, grid); each
// replica then costs one noise draw plus a convolution.
class PathSimulator {
 public:
  PathSimulator(const VolterraKernel& kernel, const LevyModel& model, std::vector<double> grid,
                SimulationOptions opts = {});

  SamplePath simulate(std::uint64_t seed, std::uint64_t replica) const;
  // Same noise, forced route; used to cross-check the fast path.
  SamplePath simulate_with(std::uint64_t seed, std::uint64_t replica, ConvolutionMethod method) const;
  // Noise increments, row-major (N x dim); increment j covers [t_j, t_{j+1}].
  std::vector<double> draw_noise(std::uint64_t seed, std::uint64_t replica) const;

  const std::vector<double>& grid() const { return grid_; }
  bool uniform() const { return uniform_; }
  // Lag weights W[m] on a uniform grid.
  const std::vector<double>& lag_weights() const { return lag_w_; }

 private:
  VolterraKernel kernel_;
  LevyModel model_;
  std::vector<double> grid_;
  SimulationOptions opts_;
  bool uniform_ = false;
  std::vector<double> lag_w_;
  std::vector<double> tri_w_;  // non-uniform: row i holds w_j(t_i), j < i
  std::vector<IncrementSampler> samplers_;
};

SamplePath simulate_path(const VolterraKernel& kernel, const LevyModel& model, const std::vector<double>& grid,
                         std::uint64_t seed, std::uint64_t replica, SimulationOptions opts = {});

std::vector<SamplePath> simulate_ensemble(const PathSimulator& sim, std::uint64_t seed, std::size_t replicas,
                                          Execution exec = Execution::Parallel);

// ∫_0^h psi(k(u) xi) du; closed-form lag energy for homogeneous psi, tanh-sinh otherwise.
double integrated_exponent(const VolterraKernel& kernel, const LevyModel& model, std::span<const double> xi,
                           double h);

// exp(-∫_0^t psi(k(t,s) xi) ds)
std::complex<double> char_function_theory(const VolterraKernel& kernel, const LevyModel& model,
                                          std::span<const double> xi, double t);

struct CfEstimate {
  std::complex<double> value;
  double se_re = 0.0;
  double se_im = 0.0;
};

CfEstimate char_function_mc(std::span<const SamplePath> ensemble, std::span<const double> xi, double t);

struct ProbeRow {
  double lag = 0.0;
  double prob = 0.0;
  double se = 0.0;
};

struct ProbeConfig {
  double eps = 0.5;
  std::size_t replicas = 20000;
  std::size_t steps = 256;  // uniform grid on [0, t]; lags must be multiples of t/steps
  std::uint64_t seed = 1;
};

std::vector<ProbeRow> continuity_in_probability_probe(const VolterraKernel& kernel, const LevyModel& model, double t,
                                                      std::span<const double> lags, const ProbeConfig& cfg = {});

}  // namespace vlab
