#include "dbar/fft.hpp"

#include <mutex>

namespace dbar {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

cplx* alloc_buffer(std::size_t count) {
  return reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * count));
}

}  // namespace

Convolver::Convolver(int n, const OffsetKernel& kernel)
    : n_(n), padded_(2 * n), buffer_(alloc_buffer(std::size_t(4) * n * n), fftw_free) {
  if (n < 1) throw InputError("Convolver: empty grid");
  make_plans();
  const int p = padded_;
  cplx* buf = buffer_.get();
  for (int b = 0; b < p; ++b) {
    const int my = (b < n) ? b : b - p;
    for (int a = 0; a < p; ++a) {
      const int mx = (a < n) ? a : a - p;
      const bool inside = (a != n) && (b != n);
      buf[a + std::size_t(p) * b] = inside ? kernel(mx, my) : cplx{};
    }
  }
  fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(buf),
                   reinterpret_cast<fftw_complex*>(buf));
  kernel_hat_.assign(buf, buf + std::size_t(p) * p);
}

Convolver::Convolver(const Convolver& other)
    : n_(other.n_),
      padded_(other.padded_),
      kernel_hat_(other.kernel_hat_),
      buffer_(alloc_buffer(std::size_t(4) * other.n_ * other.n_), fftw_free) {
  make_plans();
}

Convolver::~Convolver() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(forward_);
  if (backward_) fftw_destroy_plan(backward_);
}

void Convolver::make_plans() {
  std::lock_guard lock(planner_mutex());
  auto* buf = reinterpret_cast<fftw_complex*>(buffer_.get());
  forward_ = fftw_plan_dft_2d(padded_, padded_, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_2d(padded_, padded_, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexField Convolver::apply(const ComplexField& in) const {
  if (in.rows() != n_ || in.cols() != n_) throw InputError("Convolver: grid size mismatch");
  const int p = padded_;
  cplx* buf = buffer_.get();
  std::fill(buf, buf + std::size_t(p) * p, cplx{});
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) buf[i + std::size_t(p) * j] = in(i, j);
  fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(buf),
                   reinterpret_cast<fftw_complex*>(buf));
  for (std::size_t k = 0; k < std::size_t(p) * p; ++k) buf[k] *= kernel_hat_[k];
  fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(buf),
                   reinterpret_cast<fftw_complex*>(buf));
  const double scale = 1.0 / (double(p) * p);
  ComplexField out(n_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i) out(i, j) = buf[i + std::size_t(p) * j] * scale;
  return out;
}

}  // namespace dbar
