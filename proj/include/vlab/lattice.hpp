#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vlab {

using cplx = std::complex<double>;

// Uniform cell grid; cells_per_axis^dim cells, row-major. Periodic grids wrap
// coordinates onto [lo, lo + width).
struct SpaceGrid {
  int dim = 1;
  double lo = 0.0;
  double dx = 1.0;
  int cells = 1;
  bool periodic = false;

  static SpaceGrid box(int dim, double lo, double hi, int cells);
  static SpaceGrid torus(int dim, double period, int cells);  // centred at 0

  double width() const { return dx * cells; }
  std::size_t total() const;
  double cell_volume() const;
  double center(int i) const { return lo + (i + 0.5) * dx; }
  // flat cell index, or -1 when outside a non-periodic box
  long long locate(std::span<const double> x) const;
};

// Symmetric lattice xi = dxi * (k_1..k_d), k_i in [-K, K], row-major.
struct FreqLattice {
  int dim = 1;
  double dxi = 1.0;
  int K = 1;

  static FreqLattice torus(int dim, double period, int K);

  std::size_t size() const;
  double cutoff() const { return dxi * K; }
  double period() const;
  void multi_index(std::size_t flat, int* k) const;
  std::size_t flat_index(const int* k) const;
  void xi(std::size_t flat, double* out) const;
  double norm2(std::size_t flat) const;
  std::size_t zero_index() const;
  bool operator==(const FreqLattice& o) const { return dim == o.dim && dxi == o.dxi && K == o.K; }
};

// mu_hat_{s,t}(xi) on a lattice.
struct SpectralField {
  FreqLattice lattice;
  double s = 0.0;
  double t = 0.0;
  std::vector<cplx> values;
};

// Real trigonometric polynomial f(x) = sum_n c_n exp(i <xi_n, x>) with Hermitian c.
struct FourierSeries {
  FreqLattice lattice;
  std::vector<cplx> coeffs;

  double eval(std::span<const double> x) const;
  static FourierSeries constant(const FreqLattice& lat, double c);
  // a*cos(<m, x> dxi) + b*sin(<m, x> dxi) for an integer mode along axis 0
  static FourierSeries cosine_mode(const FreqLattice& lat, int mode, double a = 1.0, double b = 0.0);
};

// Real samples of a periodic field on a uniform torus grid, row-major.
struct LatticeField {
  int dim = 1;
  double lo = 0.0;
  double period = 1.0;
  int m = 1;
  std::vector<double> values;

  double dx() const { return period / m; }
  std::size_t size() const { return values.size(); }
};

// Samples sum_n a_n exp(i <xi_n, x>) on an m-point torus grid starting at lo;
// m must exceed 2K. imag_residue receives the largest |Im| seen.
LatticeField synthesize(const FreqLattice& lat, std::span<const cplx> a, int m, double lo,
                        double* imag_residue = nullptr);

}  // namespace vlab
