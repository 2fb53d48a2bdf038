#pragma once

#include <complex>
#include <vector>

namespace freeprob {

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& x);

// Linear convolution c[i] = sum_j kernel[i - j] * x[j] for i in [0, x.size()),
// kernel indexed by offset k in [-(n-1), n-1], stored at kernel[k + n - 1].
class ToeplitzOperator {
 public:
  ToeplitzOperator() = default;
  explicit ToeplitzOperator(const std::vector<double>& kernel_by_offset);
  std::vector<double> apply(const std::vector<double>& x) const;
  size_t size() const { return n_; }

 private:
  size_t n_ = 0;
  size_t m_ = 0;
  std::vector<std::complex<double>> kernel_hat_;
};

// Circular convolution c[i] = sum_j kernel[(i - j) mod n] * x[j].
class CirculantOperator {
 public:
  CirculantOperator() = default;
  explicit CirculantOperator(const std::vector<double>& kernel);
  std::vector<double> apply(const std::vector<double>& x) const;
  size_t size() const { return n_; }

 private:
  size_t n_ = 0;
  std::vector<std::complex<double>> kernel_hat_;
};

}  // namespace freeprob
