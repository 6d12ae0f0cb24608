#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "fklab/norms.hpp"

using namespace fklab;

namespace {

SampledFunction random_function(const UniformGrid& g, std::uint64_t seed) {
  SampledFunction f = make_zero(g, "rand");
  Rng rng(seed);
  for (double& v : f.samples) v = rng.gaussian();
  return f;
}

}  // namespace

TEST_CASE("single-cell indicator norm") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  SampledFunction f = make_zero(g);
  f[17] = 1.0;
  const WeightSpec one = WeightSpec::constant(1.0, 1);
  for (double p : {1.0, 2.0, 3.0})
    CHECK(weighted_norm(f, p, one) ==
          doctest::Approx(std::pow(g.spacing(), 1.0 / p)).epsilon(1e-14));
}

TEST_CASE("Gaussian L2 norm matches (pi/2)^{1/4}") {
  const UniformGrid g = make_grid(1, 8.0, 4096);
  const SampledFunction f =
      sample([](std::span<const double> x) { return std::exp(-x[0] * x[0]); }, g);
  const WeightSpec one = WeightSpec::constant(1.0, 1);
  CHECK(weighted_norm(f, 2.0, one) ==
        doctest::Approx(std::pow(M_PI / 2.0, 0.25)).epsilon(1e-6));
}

TEST_CASE("homogeneity is exact") {
  const UniformGrid g = make_grid(1, 4.0, 128);
  const SampledFunction f = random_function(g, 2);
  SampledFunction cf = f;
  for (double& v : cf.samples) v *= -3.5;
  const WeightSpec one = WeightSpec::constant(1.0, 1);
  CHECK(weighted_norm(cf, 2.0, one) ==
        doctest::Approx(3.5 * weighted_norm(f, 2.0, one)).epsilon(1e-15));
}

TEST_CASE("quadrature order: halving spacing converges at O(s^2) or better") {
  const WeightSpec one = WeightSpec::constant(1.0, 1);
  const double exact = std::pow(M_PI / 2.0, 0.25);
  double prev_err = 1e300;
  for (int N : {64, 128, 256}) {
    const UniformGrid g = make_grid(1, 8.0, N);
    const SampledFunction f =
        sample([](std::span<const double> x) { return std::exp(-x[0] * x[0]); }, g);
    const double err = std::abs(weighted_norm(f, 2.0, one) - exact);
    CHECK(err <= prev_err / 3.9 + 1e-15);
    prev_err = err;
  }
}

TEST_CASE("inner norm: separable factorization") {
  const UniformGrid g2 = make_grid(2, 4.0, 64);
  const UniformGrid g1 = make_grid(1, 4.0, 64);
  const SampledFunction f = sample(
      [](std::span<const double> x) {
        return std::sin(x[0]) * std::exp(-x[1] * x[1]);
      },
      g2);
  const WeightSpec v = WeightSpec::power(1.0 / 3.0, 1);
  const SampledFunction G = inner_norm(f, 2.0, v);
  const SampledFunction h =
      sample([](std::span<const double> y) { return std::exp(-y[0] * y[0]); }, g1);
  const double hnorm = weighted_norm(h, 2.0, v);
  for (int i = 0; i < 64; ++i)
    CHECK(G[i] == doctest::Approx(std::abs(std::sin(g1.coord(i))) * hnorm).epsilon(1e-12));
}

TEST_CASE("inner norm of zero is zero; dim < 2 rejected") {
  const UniformGrid g2 = make_grid(2, 4.0, 16);
  const SampledFunction z = make_zero(g2);
  const WeightSpec v = WeightSpec::constant(1.0, 1);
  for (double val : inner_norm(z, 2.0, v).samples) CHECK(val == 0.0);
  const UniformGrid g1 = make_grid(1, 4.0, 16);
  CHECK_THROWS_AS(inner_norm(make_zero(g1), 2.0, v), precondition_error);
}

TEST_CASE("mixed norm equals the inner/outer composition identically") {
  const UniformGrid g = make_grid(2, 4.0, 64);
  const SampledFunction f = random_function(g, 31);
  const MixedNormParams params{2.0, 3.0, WeightSpec::power(0.5, 1),
                               WeightSpec::power(1.0 / 3.0, 1)};
  const double direct = mixed_norm(f, params);
  const double composed =
      weighted_norm(inner_norm(f, params.q, params.v), params.p, params.u);
  CHECK(direct == doctest::Approx(composed).epsilon(1e-12));
}

TEST_CASE("unit box indicator has mixed norm 1") {
  const UniformGrid g = make_grid(2, 4.0, 128);
  const SampledFunction f = sample(
      [](std::span<const double> x) {
        return (x[0] > 0 && x[0] < 1 && x[1] > 0 && x[1] < 1) ? 1.0 : 0.0;
      },
      g, "chi");
  const MixedNormParams params{1.5, 2.5, WeightSpec::constant(1.0, 1),
                               WeightSpec::constant(1.0, 1)};
  CHECK(mixed_norm(f, params) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("p = q collapse onto the product-weight Lebesgue norm") {
  const UniformGrid g = make_grid(2, 4.0, 64);
  const WeightSpec u = WeightSpec::power(0.5, 1);
  const WeightSpec v = WeightSpec::clipped_power(-0.25, 1);
  const WeightSpec uv = WeightSpec::product(u, v);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SampledFunction f = random_function(g, 100 + seed);
    const double mixed = mixed_norm(f, MixedNormParams{2.0, 2.0, u, v});
    const double plain = weighted_norm(f, 2.0, uv);
    CHECK(mixed == doctest::Approx(plain).epsilon(1e-12));
  }
}

TEST_CASE("triangle inequality and monotonicity on random pairs") {
  const UniformGrid g = make_grid(2, 4.0, 32);
  const MixedNormParams params{2.0, 3.0, WeightSpec::constant(1.0, 1),
                               WeightSpec::power(0.25, 1)};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SampledFunction f = random_function(g, 1000 + 2 * seed);
    const SampledFunction h = random_function(g, 1001 + 2 * seed);
    SampledFunction fh = f;
    for (std::size_t i = 0; i < fh.samples.size(); ++i) fh.samples[i] += h.samples[i];
    CHECK(mixed_norm(fh, params) <=
          mixed_norm(f, params) + mixed_norm(h, params) + 1e-12);

    SampledFunction absf = f, dom = f;
    for (std::size_t i = 0; i < absf.samples.size(); ++i) {
      absf.samples[i] = std::abs(f.samples[i]);
      dom.samples[i] = std::abs(f.samples[i]) + std::abs(h.samples[i]);
    }
    CHECK(mixed_norm(absf, params) <= mixed_norm(dom, params) * (1 + 1e-14));
  }
}
