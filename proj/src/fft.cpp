#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace vbmo::detail {

namespace {

std::mutex g_plan_mutex;
using Key = std::tuple<int, int, int, int>;
std::map<Key, std::pair<fftw_plan, fftw_plan>>& plan_cache() {
  static std::map<Key, std::pair<fftw_plan, fftw_plan>> cache;
  return cache;
}

}  // namespace

RealFft::RealFft(const Grid& g) : g_(g), rank_(g.ndim) {
  for (int a = 0; a < rank_; ++a) dims_[a] = static_cast<int>(g.shape[a]);
  rsize_ = 1;
  csize_ = 1;
  for (int a = 0; a < rank_; ++a) {
    cshape_[a] = (a == rank_ - 1) ? g.shape[a] / 2 + 1 : g.shape[a];
    rsize_ *= g.shape[a];
    csize_ *= cshape_[a];
  }
  const Key key{rank_, dims_[0], dims_[1], rank_ == 3 ? dims_[2] : 1};
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it == cache.end()) {
    double* r = fftw_alloc_real(rsize_);
    fftw_complex* c = fftw_alloc_complex(csize_);
    fftw_plan pf = fftw_plan_dft_r2c(rank_, dims_.data(), r, c, FFTW_ESTIMATE);
    fftw_plan pb = fftw_plan_dft_c2r(rank_, dims_.data(), c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
    it = cache.emplace(key, std::make_pair(pf, pb)).first;
  }
  plan_f_ = it->second.first;
  plan_b_ = it->second.second;
}

std::vector<cplx> RealFft::forward(const std::vector<double>& in) const {
  double* r = fftw_alloc_real(rsize_);
  fftw_complex* c = fftw_alloc_complex(csize_);
  std::memcpy(r, in.data(), rsize_ * sizeof(double));
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_f_), r, c);
  std::vector<cplx> out(csize_);
  std::memcpy(static_cast<void*>(out.data()), c, csize_ * sizeof(fftw_complex));
  fftw_free(r);
  fftw_free(c);
  return out;
}

std::vector<double> RealFft::inverse(const std::vector<cplx>& in) const {
  double* r = fftw_alloc_real(rsize_);
  fftw_complex* c = fftw_alloc_complex(csize_);
  std::memcpy(c, static_cast<const void*>(in.data()), csize_ * sizeof(fftw_complex));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_b_), c, r);
  std::vector<double> out(rsize_);
  const double scale = 1.0 / static_cast<double>(rsize_);
  for (std::size_t i = 0; i < rsize_; ++i) out[i] = r[i] * scale;
  fftw_free(r);
  fftw_free(c);
  return out;
}

std::array<std::size_t, 3> RealFft::unravel(std::size_t q) const {
  std::array<std::size_t, 3> m{0, 0, 0};
  for (int a = rank_ - 1; a >= 0; --a) {
    m[a] = q % cshape_[a];
    q /= cshape_[a];
  }
  return m;
}

double RealFft::wavenumber(int axis, std::size_t q, bool nyquist_zero) const {
  const std::size_t N = g_.shape[axis];
  long m = static_cast<long>(q);
  if (axis != rank_ - 1 && q > N / 2) m -= static_cast<long>(N);
  if (nyquist_zero && N % 2 == 0 && q == N / 2) return 0.0;
  return 2.0 * kPi * static_cast<double>(m) / g_.length(axis);
}

}  // namespace vbmo::detail
