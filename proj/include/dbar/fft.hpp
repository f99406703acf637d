#pragma once

#include <fftw3.h>

#include <functional>
#include <memory>

#include "dbar/grid.hpp"

namespace dbar {

/// Aperiodic 2-D convolution on an n×n grid by zero padding to 2n×2n:
///   out(i,j) = Σ_{k,l} kernel(i−k, j−l) · in(k,l).
/// The kernel is sampled once at every offset in [−(n−1), n−1]².
class Convolver {
 public:
  using OffsetKernel = std::function<cplx(int dx, int dy)>;

  Convolver(int n, const OffsetKernel& kernel);
  ~Convolver();
  Convolver(const Convolver& other);
  Convolver& operator=(const Convolver&) = delete;

  int size() const { return n_; }
  ComplexField apply(const ComplexField& in) const;

 private:
  void make_plans();

  int n_;
  int padded_;
  std::vector<cplx> kernel_hat_;
  mutable std::unique_ptr<cplx[], void (*)(void*)> buffer_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace dbar
