#pragma once

#include <span>
#include <string>
#include <vector>

#include "vlab/lattice.hpp"
#include "vlab/pathsim.hpp"

namespace vlab {

// Cumulative local time L_{marks[0], marks[m]}(x), one density row per mark.
struct LocalTimeField {
  SpaceGrid grid;
  std::vector<double> marks;
  std::vector<double> density;  // marks.size() x grid.total()
  double clipped_mass = 0.0;
  std::vector<std::string> warnings;

  std::span<const double> row(std::size_t m) const {
    return {density.data() + m * grid.total(), grid.total()};
  }
  double mass(std::size_t m) const;
};

// Each step [t_r, t_{r+1}) contributes its length to the cell of z(t_r).
LocalTimeField occupation_histogram(const SamplePath& path, double s, double t, const SpaceGrid& grid);
LocalTimeField occupation_histogram_marks(const SamplePath& path, std::span<const double> marks,
                                          const SpaceGrid& grid);

enum class OccupationMethod { Auto, Direct, Fast };

// sum_r dt_r exp(i <xi, z_r>) over the steps of [s, t). Fast: Taylor-corrected
// histogram on the dual torus plus FFT (d = 1).
SpectralField occupation_fourier(const SamplePath& path, double s, double t, const FreqLattice& lattice,
                                 OccupationMethod method = OccupationMethod::Auto);

// Direct sum over the step index range [i0, i1), all lattice points.
void occupation_fourier_steps(const SamplePath& path, std::size_t i0, std::size_t i1, const FreqLattice& lattice,
                              std::span<cplx> out);

// Fourier transform of a histogram local time row, cell-centre rule.
SpectralField histogram_transform(const LocalTimeField& L, std::size_t mark, const FreqLattice& lattice);

struct SobolevNorm {
  double norm = 0.0;       // sqrt(truncated + tail)
  double truncated = 0.0;  // lattice sum of (2 pi)^-d (1+|xi|^2)^kappa |mu|^2 dxi^d
  double tail = 0.0;
  double tail_fraction = 0.0;
  double decay = 0.0;  // fitted exponent of the radial density in the top octave
  bool warning = false;
};

SobolevNorm sobolev_norm(const SpectralField& field, double kappa, bool estimate_tail = true);

// Relative L^2 gap between the histogram and direct Fourier routes over
// lattice frequencies below max_xi.
double localtime_route_agreement(const SamplePath& path, double s, double t, const SpaceGrid& grid,
                                 const FreqLattice& lattice, double max_xi);

struct LocalTimeFormulaResult {
  std::vector<double> lhs;
  std::vector<double> rhs;
  double max_error = 0.0;
};

// ∫_s^t b(y + z_r) dr by a left-point time sum versus (b * Lbar_{s,t})(y) from
// the histogram local time on a periodic grid whose width is b's period.
LocalTimeFormulaResult localtime_formula_check(const FourierSeries& b, const SamplePath& path, double s, double t,
                                               std::span<const double> shifts, const SpaceGrid& grid);

}  // namespace vlab
