#include "fklab/fft.hpp"

#include <cmath>

namespace fklab {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_pow2(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  require((n & (n - 1)) == 0 && n > 0, "fft_pow2: size must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * 3.141592653589793238462643 / double(len);
    const cdouble wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cdouble u = a[i + k];
        const cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (sign > 0)
    for (auto& z : a) z /= double(n);
}

CenteredTransform::CenteredTransform(int n, double half_width) : n_(n) {
  require(n >= 1, "CenteredTransform: n must be positive");
  dxi_ = 3.141592653589793238462643 / half_width;
  const std::int64_t m = 4 * std::int64_t(n);
  phase_.resize(std::size_t(m));
  for (std::int64_t k = 0; k < m; ++k)
    phase_[std::size_t(k)] =
        std::polar(1.0, -2.0 * 3.141592653589793238462643 * double(k) / double(m));
}

// x_j xi_k = 2 pi (2j+1-N)(2k-N) / (4N); the half-cell offset sits on the
// space index j in both directions.
std::vector<cdouble> CenteredTransform::apply(const std::vector<cdouble>& in,
                                              int sign) const {
  require(int(in.size()) == n_, "CenteredTransform: size mismatch");
  const std::int64_t M = 4 * std::int64_t(n_);
  std::vector<cdouble> out(static_cast<std::size_t>(n_));
  for (int o = 0; o < n_; ++o) {
    // forward: o is the frequency index; inverse: o is the space index
    const std::int64_t fo =
        sign > 0 ? 2 * std::int64_t(o) - n_ : 2 * std::int64_t(o) + 1 - n_;
    cdouble acc(0.0, 0.0);
    for (int i = 0; i < n_; ++i) {
      const std::int64_t fi =
          sign > 0 ? 2 * std::int64_t(i) + 1 - n_ : 2 * std::int64_t(i) - n_;
      std::int64_t m = fi * fo * sign;
      m = ((m % M) + M) % M;
      acc += in[std::size_t(i)] * phase_[std::size_t(m)];
    }
    out[std::size_t(o)] = acc;
  }
  return out;
}

std::vector<cdouble> CenteredTransform::forward(const std::vector<cdouble>& in) const {
  return apply(in, +1);  // exp(-i x_j xi_k), sum over space j
}

std::vector<cdouble> CenteredTransform::inverse(const std::vector<cdouble>& in) const {
  return apply(in, -1);  // exp(+i x_j xi_k), sum over frequency k
}

}  // namespace fklab
