// Thin FFTW wrapper for real transforms over the ndim axes of a Grid.
#pragma once

#include <complex>
#include <vector>

#include "vbmo/fields.hpp"

namespace vbmo::detail {

using cplx = std::complex<double>;

class RealFft {
 public:
  explicit RealFft(const Grid& g);
  std::size_t complex_size() const { return csize_; }
  std::size_t real_size() const { return rsize_; }
  // Unnormalised forward transform.
  std::vector<cplx> forward(const std::vector<double>& in) const;
  // Inverse transform including the 1/N factor.
  std::vector<double> inverse(const std::vector<cplx>& in) const;
  // Angular wavenumber of complex entry q along axis; nyquist_zero sets the
  // Nyquist mode of even axes to zero (first-derivative convention).
  double wavenumber(int axis, std::size_t q, bool nyquist_zero) const;
  std::array<std::size_t, 3> unravel(std::size_t q) const;

 private:
  Grid g_;
  int rank_;
  std::array<int, 3> dims_{};
  std::array<std::size_t, 3> cshape_{1, 1, 1};
  std::size_t csize_ = 0, rsize_ = 0;
  void* plan_f_ = nullptr;
  void* plan_b_ = nullptr;
};

}  // namespace vbmo::detail
