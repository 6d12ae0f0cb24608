#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "fklab/fft.hpp"

using namespace fklab;

namespace {

// quadratic-time DFT oracle, independent of the radix-2 path
std::vector<cdouble> naive_dft(const std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  std::vector<cdouble> out(n, cdouble(0, 0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      out[k] += a[j] * std::polar(1.0, sign * 2.0 * M_PI * double(j * k % n) / double(n));
  if (sign > 0)
    for (auto& z : out) z /= double(n);
  return out;
}

}  // namespace

TEST_CASE("radix-2 fft matches the naive DFT oracle") {
  Rng rng(3);
  for (std::size_t n : {2u, 8u, 64u, 256u}) {
    std::vector<cdouble> a(n);
    for (auto& z : a) z = cdouble(rng.gaussian(), rng.gaussian());
    std::vector<cdouble> b = a;
    fft_pow2(b, -1);
    const std::vector<cdouble> oracle = naive_dft(a, -1);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(b[i] - oracle[i]) <= 1e-10 * double(n));
  }
}

TEST_CASE("fft inverse round trip") {
  Rng rng(4);
  std::vector<cdouble> a(512);
  for (auto& z : a) z = cdouble(rng.gaussian(), rng.gaussian());
  std::vector<cdouble> b = a;
  fft_pow2(b, -1);
  fft_pow2(b, +1);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
}

TEST_CASE("centered transform: inverse(forward) = N id on the cell lattice") {
  for (int n : {8, 64, 129}) {
    const CenteredTransform T(n, 8.0);
    Rng rng(9);
    std::vector<cdouble> a(static_cast<std::size_t>(n));
    for (auto& z : a) z = cdouble(rng.gaussian(), rng.gaussian());
    const std::vector<cdouble> round = T.inverse(T.forward(a));
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(round[std::size_t(i)] / double(n) - a[std::size_t(i)]) <= 1e-12);
  }
}

TEST_CASE("centered transform forward agrees with its definition") {
  const int n = 16;
  const double L = 4.0;
  const CenteredTransform T(n, L);
  Rng rng(11);
  std::vector<cdouble> a(static_cast<std::size_t>(n));
  for (auto& z : a) z = cdouble(rng.gaussian(), 0.0);
  const auto fwd = T.forward(a);
  const double s = 2.0 * L / n;
  for (int k = 0; k < n; ++k) {
    cdouble acc(0, 0);
    const double xi = T.freq(k);
    for (int j = 0; j < n; ++j) {
      const double x = -L + (j + 0.5) * s;
      acc += a[std::size_t(j)] * std::polar(1.0, -x * xi);
    }
    CHECK(std::abs(fwd[std::size_t(k)] - acc) <= 1e-12 * double(n));
  }
}
