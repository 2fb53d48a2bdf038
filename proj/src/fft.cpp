#include "freeprob/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace freeprob {

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, x);
  return out;
}

std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.inv(out, x);
  return out;
}

namespace {

size_t good_size(size_t n) {
  size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

ToeplitzOperator::ToeplitzOperator(const std::vector<double>& kernel_by_offset) {
  n_ = (kernel_by_offset.size() + 1) / 2;
  m_ = good_size(2 * n_);
  std::vector<std::complex<double>> k(m_, 0.0);
  for (size_t off = 0; off < n_; ++off) k[off] = kernel_by_offset[off + n_ - 1];
  for (size_t off = 1; off < n_; ++off) k[m_ - off] = kernel_by_offset[n_ - 1 - off];
  kernel_hat_ = fft_forward(k);
}

std::vector<double> ToeplitzOperator::apply(const std::vector<double>& x) const {
  std::vector<std::complex<double>> xx(m_, 0.0);
  for (size_t i = 0; i < n_; ++i) xx[i] = x[i];
  auto xh = fft_forward(xx);
  for (size_t i = 0; i < m_; ++i) xh[i] *= kernel_hat_[i];
  auto y = fft_inverse(xh);
  std::vector<double> out(n_);
  for (size_t i = 0; i < n_; ++i) out[i] = y[i].real();
  return out;
}

CirculantOperator::CirculantOperator(const std::vector<double>& kernel) {
  n_ = kernel.size();
  std::vector<std::complex<double>> k(kernel.begin(), kernel.end());
  kernel_hat_ = fft_forward(k);
}

std::vector<double> CirculantOperator::apply(const std::vector<double>& x) const {
  std::vector<std::complex<double>> xx(x.begin(), x.end());
  auto xh = fft_forward(xx);
  for (size_t i = 0; i < n_; ++i) xh[i] *= kernel_hat_[i];
  auto y = fft_inverse(xh);
  std::vector<double> out(n_);
  for (size_t i = 0; i < n_; ++i) out[i] = y[i].real();
  return out;
}

}  // namespace freeprob
