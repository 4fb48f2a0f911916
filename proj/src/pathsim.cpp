#include "vlab/pathsim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "vlab/errors.hpp"
#include "vlab/fft.hpp"
#include "vlab/quadrature.hpp"
#include "vlab/stats.hpp"

namespace vlab {

std::size_t SamplePath::index_of(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) throw GridError("time is not a grid point of the path");
  return static_cast<std::size_t>(std::distance(times.begin(), it));
}

std::vector<double> uniform_grid(double T, std::size_t steps) {
  if (!(T > 0.0) || steps == 0) throw GridError("uniform grid needs T > 0 and at least one step");
  std::vector<double> g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g[i] = T * static_cast<double>(i) / static_cast<double>(steps);
  g.back() = T;
  return g;
}

PathSimulator::PathSimulator(const VolterraKernel& kernel, const LevyModel& model, std::vector<double> grid,
                             SimulationOptions opts)
    : kernel_(kernel), model_(model), grid_(std::move(grid)), opts_(opts) {
  kernel_.validate();
  model_.validate();
  const std::size_t n1 = grid_.size();
  if (n1 < 2) throw GridError("simulation grid needs at least two points");
  if (grid_.front() != 0.0) throw GridError("simulation grid must start at 0");
  for (std::size_t i = 1; i < n1; ++i)
    if (!(grid_[i] > grid_[i - 1])) throw GridError("simulation grid must be strictly increasing");
  if (grid_.back() > kernel_.T_max * (1.0 + 1e-12)) throw DomainError("simulation grid exceeds kernel horizon");

  const std::size_t n = n1 - 1;
  const double h = grid_.back() / static_cast<double>(n);
  uniform_ = true;
  for (std::size_t i = 0; i < n && uniform_; ++i)
    uniform_ = std::abs(grid_[i + 1] - grid_[i] - h) <= 1e-12 * grid_.back();

  const double a = model_.index();
  if (uniform_) {
    samplers_.emplace_back(model_, h);
    lag_w_.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      const double e = lag_alpha_energy(kernel_, a, h * static_cast<double>(m), h * static_cast<double>(m + 1));
      lag_w_[m] = std::pow(e / h, 1.0 / a);
    }
  } else {
    const double work = 0.5 * static_cast<double>(n) * static_cast<double>(n);
    if (work > opts_.work_cap) throw BudgetError("non-uniform grid exceeds the O(N^2) work cap");
    samplers_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) samplers_.emplace_back(model_, grid_[j + 1] - grid_[j]);
    tri_w_.assign(n * (n + 1) / 2, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
      const double t = grid_[i];
      double* row = tri_w_.data() + (i - 1) * i / 2;
      for (std::size_t j = 0; j < i; ++j) {
        const double dj = grid_[j + 1] - grid_[j];
        const double e = lag_alpha_energy(kernel_, a, j + 1 == i ? 0.0 : t - grid_[j + 1], t - grid_[j]);
        row[j] = std::pow(e / dj, 1.0 / a);
      }
    }
  }
}

std::vector<double> PathSimulator::draw_noise(std::uint64_t seed, std::uint64_t replica) const {
  const std::size_t n = grid_.size() - 1;
  const auto d = static_cast<std::size_t>(model_.dim);
  std::vector<double> dl(n * d);
  for (std::size_t j = 0; j < n; ++j) {
    RngStream rng(seed, replica, j);
    const auto& s = samplers_[uniform_ ? 0 : j];
    s.draw(rng, std::span<double>(dl.data() + j * d, d));
  }
  return dl;
}

SamplePath PathSimulator::simulate(std::uint64_t seed, std::uint64_t replica) const {
  return simulate_with(seed, replica, opts_.method);
}

SamplePath PathSimulator::simulate_with(std::uint64_t seed, std::uint64_t replica, ConvolutionMethod method) const {
  const std::size_t n = grid_.size() - 1;
  const auto d = static_cast<std::size_t>(model_.dim);
  const auto dl = draw_noise(seed, replica);

  SamplePath p;
  p.times = grid_;
  p.dim = model_.dim;
  p.values.assign((n + 1) * d, 0.0);
  p.meta = {kernel_.id(), model_.id(), seed, replica};

  if (!uniform_) {
    if (method == ConvolutionMethod::FFT) throw GridError("FFT route needs a uniform grid");
    for (std::size_t i = 1; i <= n; ++i) {
      const double* row = tri_w_.data() + (i - 1) * i / 2;
      for (std::size_t k = 0; k < d; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) acc += row[j] * dl[j * d + k];
        p.values[i * d + k] = acc;
      }
    }
    return p;
  }

  if (kernel_.family == KernelFamily::Constant && method != ConvolutionMethod::FFT) {
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < d; ++k) p.values[i * d + k] = p.values[(i - 1) * d + k] + dl[(i - 1) * d + k];
    return p;
  }

  const bool use_fft = method == ConvolutionMethod::FFT ||
                       (method == ConvolutionMethod::Auto && n >= opts_.fft_threshold);
  if (use_fft) {
    std::vector<double> col(n);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t j = 0; j < n; ++j) col[j] = dl[j * d + k];
      const auto c = fft_convolve(lag_w_, col, n);
      for (std::size_t m = 0; m < n; ++m) p.values[(m + 1) * d + k] = c[m];
    }
    return p;
  }

  if (0.5 * static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(d) > opts_.work_cap)
    throw BudgetError("direct convolution exceeds the O(N^2) work cap");
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) acc += lag_w_[i - 1 - j] * dl[j * d + k];
      p.values[i * d + k] = acc;
    }
  return p;
}

SamplePath simulate_path(const VolterraKernel& kernel, const LevyModel& model, const std::vector<double>& grid,
                         std::uint64_t seed, std::uint64_t replica, SimulationOptions opts) {
  return PathSimulator(kernel, model, grid, opts).simulate(seed, replica);
}

std::vector<SamplePath> simulate_ensemble(const PathSimulator& sim, std::uint64_t seed, std::size_t replicas,
                                          Execution exec) {
  std::vector<SamplePath> out(replicas);
  if (exec == Execution::Serial) {
    for (std::size_t r = 0; r < replicas; ++r) out[r] = sim.simulate(seed, r);
    return out;
  }
  std::exception_ptr err;
  std::mutex mu;
  const auto n = static_cast<long long>(replicas);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count())
  for (long long r = 0; r < n; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = sim.simulate(seed, static_cast<std::uint64_t>(r));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

std::complex<double> char_function_theory(const VolterraKernel& kernel, const LevyModel& model,
                                          std::span<const double> xi, double t) {
  kernel.validate();
  if (!(t >= 0.0) || t > kernel.T_max * (1.0 + 1e-12)) throw DomainError("t outside the kernel horizon");
  if (static_cast<int>(xi.size()) != model.dim) throw DomainError("xi dimension does not match the model");
  if (t == 0.0 || std::all_of(xi.begin(), xi.end(), [](double v) { return v == 0.0; })) return {1.0, 0.0};
  return {std::exp(-integrated_exponent(kernel, model, xi, t)), 0.0};
}

double integrated_exponent(const VolterraKernel& kernel, const LevyModel& model, std::span<const double> xi,
                           double h) {
  // psi(k xi) = k^index psi(xi) for the stable families, so the lag energy carries all the singularity
  if (model.homogeneous()) return char_exponent(model, xi) * lag_alpha_energy(kernel, model.index(), 0.0, h);
  const auto f = [&](double u) { return char_exponent_scaled(model, log_kernel_lag(kernel, u), xi); };
  return integrate_left_singular(f, h);
}

CfEstimate char_function_mc(std::span<const SamplePath> ensemble, std::span<const double> xi, double t) {
  if (ensemble.empty()) throw GridError("empty ensemble");
  Welford re, im;
  for (const auto& p : ensemble) {
    if (static_cast<int>(xi.size()) != p.dim) throw DomainError("xi dimension does not match the path");
    const auto z = p.point(p.index_of(t));
    double ph = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) ph += xi[k] * z[k];
    re.push(std::cos(ph));
    im.push(std::sin(ph));
  }
  return {{re.mean, im.mean}, re.std_err(), im.std_err()};
}

std::vector<ProbeRow> continuity_in_probability_probe(const VolterraKernel& kernel, const LevyModel& model, double t,
                                                      std::span<const double> lags, const ProbeConfig& cfg) {
  const double h = t / static_cast<double>(cfg.steps);
  std::vector<std::size_t> steps;
  for (double lag : lags) {
    if (lag < 0.0 || lag > t * (1.0 + 1e-12)) throw GridError("probe lag must lie in [0, t]");
    const double m = std::round(lag / h);
    if (std::abs(m * h - lag) > 1e-9 * t) throw GridError("probe lag is not a multiple of the grid step");
    steps.push_back(static_cast<std::size_t>(m));
  }
  PathSimulator sim(kernel, model, uniform_grid(t, cfg.steps));
  const std::size_t n = cfg.steps;
  const auto d = static_cast<std::size_t>(model.dim);
  std::vector<std::vector<unsigned char>> hit(lags.size(), std::vector<unsigned char>(cfg.replicas, 0));
  const auto R = static_cast<long long>(cfg.replicas);
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
  for (long long r = 0; r < R; ++r) {
    const auto p = sim.simulate(cfg.seed, static_cast<std::uint64_t>(r));
    for (std::size_t l = 0; l < steps.size(); ++l) {
      if (steps[l] == 0) continue;
      double s2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double dz = p.values[n * d + k] - p.values[(n - steps[l]) * d + k];
        s2 += dz * dz;
      }
      hit[l][static_cast<std::size_t>(r)] = std::sqrt(s2) > cfg.eps ? 1 : 0;
    }
  }
  std::vector<ProbeRow> rows;
  for (std::size_t l = 0; l < steps.size(); ++l) {
    Welford w;
    for (auto v : hit[l]) w.push(v);
    rows.push_back({lags[l], steps[l] == 0 ? 0.0 : w.mean, steps[l] == 0 ? 0.0 : w.std_err()});
  }
  return rows;
}

}  // namespace vlab
