#pragma once

#include <complex>
#include <vector>

#include "fklab/common.hpp"

namespace fklab {

using cdouble = std::complex<double>;

/// In-place iterative radix-2 FFT; size must be a power of two.
/// sign = -1 forward, +1 inverse (inverse includes the 1/n factor).
void fft_pow2(std::vector<cdouble>& a, int sign);

std::size_t next_pow2(std::size_t n);

/// Centered discrete transform adapted to the cell-center lattice
/// x_j = (j + 1/2 - N/2) s and dual lattice xi_k = (k - N/2) dxi with
/// s * dxi = 2 pi / N. Direct O(N^2) evaluation with cached phases:
///   forward:  out[k] = sum_j in[j] exp(-i x_j xi_k)
///   inverse:  out[j] = sum_k in[k] exp(+i x_j xi_k)
/// The pair satisfies inverse(forward(f)) = N f exactly in exact arithmetic.
class CenteredTransform {
 public:
  CenteredTransform(int n, double half_width);

  std::vector<cdouble> forward(const std::vector<cdouble>& in) const;
  std::vector<cdouble> inverse(const std::vector<cdouble>& in) const;

  int size() const { return n_; }
  double freq(int k) const { return (k - n_ / 2) * dxi_; }

 private:
  std::vector<cdouble> apply(const std::vector<cdouble>& in, int sign) const;

  int n_;
  double dxi_;
  std::vector<cdouble> phase_;  // phase_[m] = exp(-2 pi i m / (2 n)), m in [0, 4n)
};

}  // namespace fklab
