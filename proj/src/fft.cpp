#include "vlab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>

#include "vlab/errors.hpp"

namespace vlab {

namespace {

// fftw planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using fftw_buffer = std::unique_ptr<T[], FftwFree>;

template <class T>
fftw_buffer<T> alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) throw std::bad_alloc();
  return fftw_buffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : p_(p) {
    if (!p_) throw LatticeError("fftw failed to create a plan");
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(p_); }

 private:
  fftw_plan p_;
};

std::size_t good_size(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b, std::size_t n_out) {
  if (a.empty() || b.empty() || n_out == 0) return std::vector<double>(n_out, 0.0);
  const std::size_t na = std::min(a.size(), n_out);
  const std::size_t nb = std::min(b.size(), n_out);
  const std::size_t n = good_size(na + nb - 1);
  const std::size_t nc = n / 2 + 1;
  auto ra = alloc<double>(n);
  auto rb = alloc<double>(n);
  auto ca = alloc<fftw_complex>(nc);
  auto cb = alloc<fftw_complex>(nc);
  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy_n(a.begin(), na, ra.get());
  std::copy_n(b.begin(), nb, rb.get());
  std::unique_ptr<Plan> fa, fb, inv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int ni = static_cast<int>(n);
    fa = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(ni, ra.get(), ca.get(), FFTW_ESTIMATE));
    fb = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(ni, rb.get(), cb.get(), FFTW_ESTIMATE));
    inv = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(ni, ca.get(), ra.get(), FFTW_ESTIMATE));
  }
  fa->execute();
  fb->execute();
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = ca[k][0] * cb[k][0] - ca[k][1] * cb[k][1];
    const double im = ca[k][0] * cb[k][1] + ca[k][1] * cb[k][0];
    ca[k][0] = re;
    ca[k][1] = im;
  }
  inv->execute();
  std::vector<double> out(n_out, 0.0);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < std::min(n_out, n); ++i) out[i] = ra[i] * scale;
  return out;
}

void dft(std::vector<cplx>& data, std::span<const int> dims, int sign) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d <= 0) throw LatticeError("dft dimensions must be positive");
    total *= static_cast<std::size_t>(d);
  }
  if (total != data.size()) throw LatticeError("dft size does not match dimensions");
  auto buf = alloc<fftw_complex>(total);
  std::memcpy(buf.get(), data.data(), sizeof(fftw_complex) * total);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf.get(),
                                                buf.get(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                                FFTW_ESTIMATE));
  }
  plan->execute();
  std::memcpy(static_cast<void*>(data.data()), buf.get(), sizeof(fftw_complex) * total);
}

}  // namespace vlab
