#pragma once

#include <cstdint>

#include "vlab/lattice.hpp"
#include "vlab/occupation.hpp"

namespace vlab {

struct SpectralDrift {
  FourierSeries series;
  double beta_target = 0.0;
  std::uint64_t seed = 0;
  double target_norm = 0.0;

  const FreqLattice& lattice() const { return series.lattice; }
};

// Lattice H^beta norm (sum_n (1+|xi_n|^2)^beta |c_n|^2)^{1/2} of a Fourier series.
double drift_sobolev_norm(const FourierSeries& b, double beta);

// Random Fourier series with c_n = a_n (1+|xi_n|^2)^{-(beta+d/2+0.05)/2}, a_n
// standard complex Gaussian keyed per mode (fields stay nested as K grows),
// rescaled so the realized H^beta norm equals sqrt(E ||b||^2).
SpectralDrift synth_besov_drift(double beta, const FreqLattice& lattice, std::uint64_t seed);

SpectralDrift drift_constant(const FreqLattice& lattice, double c);
SpectralDrift drift_cosine(const FreqLattice& lattice, int mode, double amplitude = 1.0);
SpectralDrift drift_sine(const FreqLattice& lattice, int mode, double amplitude = 1.0);
// periodized Gaussian exp(-x^2 / (2 w^2)), truncated to the lattice
SpectralDrift drift_gaussian_bump(const FreqLattice& lattice, double width);

LatticeField drift_field(const SpectralDrift& b, int m, double* imag_residue = nullptr);

// (b * Lbar_{s,t})(y) = ∫ b(y + x) L_{s,t}(x) dx sampled on an m-point torus grid.
LatticeField convolve_spectral(const SpectralDrift& b, const SpectralField& mu, int m);
LatticeField convolve_spectral(const SpectralDrift& b, const LocalTimeField& L, std::size_t mark, int m);

// Lattice C^theta norm over pairs with |x - y| <= 1 (torus distance); theta in
// (1, 2] uses central-difference gradients.
double holder_spatial_norm(const LatticeField& f, double theta);

}  // namespace vlab
