#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fklab/grid.hpp"
#include "fklab/norms.hpp"

using namespace fklab;

TEST_CASE("cell centers avoid the origin and are symmetric") {
  const UniformGrid g = make_grid(1, 8.0, 1024);
  CHECK(g.spacing() == doctest::Approx(16.0 / 1024));
  for (int i = 0; i < g.points_per_axis; ++i) CHECK(g.coord(i) != 0.0);
  CHECK(g.coord(0) == doctest::Approx(-8.0 + 0.5 * g.spacing()));
}

TEST_CASE("sample: constant and Gaussian symmetry") {
  const UniformGrid g = make_grid(1, 8.0, 1024);
  const SampledFunction one =
      sample([](std::span<const double>) { return 1.0; }, g, "1");
  for (double v : one.samples) CHECK(v == 1.0);

  const SampledFunction gauss =
      sample([](std::span<const double> x) { return std::exp(-x[0] * x[0]); }, g);
  const int N = g.points_per_axis;
  for (int i = 0; i < N; ++i)
    CHECK(gauss[i] == doctest::Approx(gauss[N - 1 - i]).epsilon(1e-14));
}

TEST_CASE("sample: sqrt|x| has positive minimum at the center-adjacent cells") {
  const UniformGrid g = make_grid(1, 8.0, 1024);
  const SampledFunction f = sample(
      [](std::span<const double> x) { return std::sqrt(std::abs(x[0])); }, g);
  double mn = 1e300;
  for (double v : f.samples) mn = std::min(mn, v);
  CHECK(mn == doctest::Approx(std::sqrt(0.5 * g.spacing())).epsilon(1e-13));
  CHECK(mn > 0.0);
}

TEST_CASE("sample rejects non-finite values naming the cell") {
  const UniformGrid g = make_grid(1, 1.0, 4);
  CHECK_THROWS_AS(
      sample([](std::span<const double> x) { return 1.0 / (x[0] - x[0]); }, g),
      precondition_error);
}

TEST_CASE("translate: identity, single-cell shift, zero extension") {
  const UniformGrid g = make_grid(1, 1.0, 8);
  SampledFunction f = make_zero(g, "ind");
  f[3] = 1.0;

  const double zero[1] = {0.0};
  const SampledFunction same = translate(f, zero);
  CHECK(same.samples == f.samples);

  // f(x + s) puts the bump one cell to the left
  const double right[1] = {g.spacing()};
  const SampledFunction moved = translate(f, right);
  CHECK(moved[2] == 1.0);
  CHECK(moved[3] == 0.0);

  const double huge[1] = {10.0};
  CHECK_THROWS_AS(translate(f, huge), precondition_error);
}

TEST_CASE("translate: norm never grows, equality when no mass leaves") {
  const UniformGrid g = make_grid(1, 1.0, 64);
  const WeightSpec one = WeightSpec::constant(1.0, 1);
  // bump flush against the right boundary
  SampledFunction f = make_zero(g, "edge");
  f[62] = 1.0;
  f[63] = 1.0;
  const double shift[1] = {-2.0 * g.spacing()};  // f(x - 2s): pushes mass out
  const SampledFunction out = translate(f, shift);
  CHECK(weighted_norm(out, 2.0, one) < weighted_norm(f, 2.0, one));

  SampledFunction mid = make_zero(g, "mid");
  mid[30] = 1.0;
  const SampledFunction moved = translate(mid, shift);
  CHECK(weighted_norm(moved, 2.0, one) ==
        doctest::Approx(weighted_norm(mid, 2.0, one)).epsilon(1e-15));
}

TEST_CASE("translate round trip is exact away from the boundary") {
  const UniformGrid g = make_grid(1, 1.0, 64);
  SampledFunction f = make_zero(g);
  Rng rng(5);
  for (double& v : f.samples) v = rng.uniform();
  const double h[1] = {3.0 * g.spacing()};
  const double hneg[1] = {-3.0 * g.spacing()};
  const SampledFunction back = translate(translate(f, h), hneg);
  for (int i = 3; i < 61; ++i) CHECK(back[i] == f[i]);
}

TEST_CASE("tail_restrict: R=0 keeps everything, R >= L sqrt(d) clears") {
  const UniformGrid g = make_grid(2, 2.0, 16);
  SampledFunction f = make_zero(g);
  Rng rng(7);
  for (double& v : f.samples) v = rng.uniform() + 0.5;
  CHECK(tail_restrict(f, 0.0).samples == f.samples);
  const SampledFunction far = tail_restrict(f, 2.0 * std::sqrt(2.0));
  for (double v : far.samples) CHECK(v == 0.0);
}

TEST_CASE("tail_restrict: indicator of [1,2] halves at R = 1.5") {
  const UniformGrid g = make_grid(1, 8.0, 1024);
  const SampledFunction f = sample(
      [](std::span<const double> x) { return x[0] >= 1.0 && x[0] <= 2.0 ? 1.0 : 0.0; },
      g, "ind[1,2]");
  const SampledFunction t = tail_restrict(f, 1.5);
  double before = 0.0, after = 0.0;
  for (double v : f.samples) before += v;
  for (double v : t.samples) after += v;
  CHECK(after == doctest::Approx(before / 2.0).epsilon(2.0 / before));
}

TEST_CASE("tail_restrict: idempotent and monotone in R") {
  const UniformGrid g = make_grid(1, 4.0, 128);
  const SampledFunction f =
      sample([](std::span<const double> x) { return std::cos(x[0]) + 2.0; }, g);
  const SampledFunction a = tail_restrict(f, 1.0);
  CHECK(tail_restrict(a, 1.0).samples == a.samples);
  const SampledFunction b = tail_restrict(f, 2.5);
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i] == 0.0) CHECK(b.samples[i] == 0.0);
}

TEST_CASE("cube_family counts: exhaustive and dyadic") {
  const UniformGrid g4 = make_grid(1, 1.0, 4);
  CHECK(cube_family(g4, Exhaustive1d{}).size() == 10);

  const UniformGrid g8 = make_grid(1, 1.0, 8);
  CHECK(cube_family(g8, Dyadic{}).size() == 15);

  const UniformGrid g2 = make_grid(2, 1.0, 64);
  const CubeFamily strat = cube_family(g2, Stratified{2000, 7});
  CHECK(strat.size() == 2000);
  const CubeFamily again = cube_family(g2, Stratified{2000, 7});
  for (std::size_t i = 0; i < strat.cubes.size(); ++i) {
    CHECK(strat.cubes[i].corner == again.cubes[i].corner);
    CHECK(strat.cubes[i].sides == again.cubes[i].sides);
  }
  CHECK_THROWS_AS(cube_family(g2, Stratified{0, 1}), precondition_error);
  CHECK_THROWS_AS(cube_family(g2, Exhaustive1d{}), precondition_error);
}

TEST_CASE("dyadic families cover the grid, stratified may not") {
  const UniformGrid g = make_grid(2, 1.0, 16);
  CHECK(covers_grid(cube_family(g, Dyadic{})));
  CHECK(covers_grid(cube_family(make_grid(1, 1.0, 37), Dyadic{})));
}

TEST_CASE("serialization round trip is bit-exact") {
  const UniformGrid g = make_grid(1, 8.0, 64);
  SampledFunction f = make_zero(g, "roundtrip test");
  Rng rng(13);
  for (double& v : f.samples) v = rng.gaussian() * std::exp(rng.uniform() * 40 - 20);
  std::stringstream ss;
  save_function(f, ss);
  const SampledFunction back = load_function(ss);
  CHECK(back.grid == f.grid);
  CHECK(back.label == f.label);
  for (std::size_t i = 0; i < f.samples.size(); ++i) CHECK(back.samples[i] == f.samples[i]);
}
