#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "fklab/maximal.hpp"

using namespace fklab;

namespace {

SampledFunction random_function(const UniformGrid& g, std::uint64_t seed, bool spiky) {
  SampledFunction f = make_zero(g, "rand");
  Rng rng(seed);
  for (double& v : f.samples) v = rng.gaussian();
  if (spiky) {
    for (int k = 0; k < 5; ++k)
      f.samples[std::size_t(rng.uniform_int(std::int64_t(f.samples.size())))] =
          rng.gaussian() * 100.0;
  }
  return f;
}

}  // namespace

TEST_CASE("maximal of a constant is the constant") {
  const UniformGrid g = make_grid(1, 8.0, 128);
  const SampledFunction f =
      sample([](std::span<const double>) { return 0.7; }, g, "c");
  const MaximalParams params = make_maximal_params(cube_family(g, Exhaustive1d{}));
  const SampledFunction mf = hl_maximal(f, params);
  for (double v : mf.samples) CHECK(v == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("maximal of the unit-interval indicator decays like 2/(|x|+1)") {
  const UniformGrid g = make_grid(1, 8.0, 512);
  const SampledFunction f = sample(
      [](std::span<const double> x) { return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0; }, g,
      "chi");
  const MaximalParams params = make_maximal_params(cube_family(g, Exhaustive1d{}));
  const SampledFunction mf = hl_maximal(f, params);
  for (int i = 0; i < 512; ++i) {
    const double x = g.coord(i);
    if (std::abs(x) <= 0.99) {
      CHECK(mf[i] == doctest::Approx(1.0).epsilon(0.02));
    } else if (std::abs(x) >= 1.1) {
      CHECK(mf[i] == doctest::Approx(2.0 / (std::abs(x) + 1.0)).epsilon(0.03));
    }
  }
  // M f >= |f| pointwise (singleton intervals are in the family)
  for (int i = 0; i < 512; ++i) CHECK(mf[i] >= std::abs(f[i]) - 1e-15);
}

TEST_CASE("optimized 1-D maximal equals the brute-force oracle sample-exactly") {
  for (int N : {16, 33, 64, 257, 512}) {
    const UniformGrid g = make_grid(1, 8.0, N);
    const MaximalParams params = make_maximal_params(cube_family(g, Exhaustive1d{}));
    std::vector<SampledFunction> cases;
    cases.push_back(sample([](std::span<const double>) { return 1.25; }, g, "const"));
    cases.push_back(sample([](std::span<const double> x) { return x[0] + 9.0; }, g, "ramp"));
    cases.push_back(random_function(g, 40 + std::uint64_t(N), false));
    cases.push_back(random_function(g, 80 + std::uint64_t(N), true));
    SampledFunction zero_heavy = random_function(g, 120 + std::uint64_t(N), false);
    for (std::size_t i = 0; i < zero_heavy.samples.size(); i += 2)
      zero_heavy.samples[i] = 0.0;
    cases.push_back(zero_heavy);
    for (const SampledFunction& f : cases) {
      const SampledFunction fast = hl_maximal(f, params);
      const SampledFunction brute = reference::hl_maximal(f, params);
      for (std::size_t i = 0; i < fast.samples.size(); ++i)
        CHECK(fast.samples[i] == brute.samples[i]);
    }
  }
}

TEST_CASE("family maximal: parallel equals the serial reference exactly") {
  const UniformGrid g = make_grid(2, 4.0, 32);
  const MaximalParams params = make_maximal_params(cube_family(g, Dyadic{}));
  const SampledFunction f = random_function(g, 7, true);
  const SampledFunction a = hl_maximal(f, params);
  const SampledFunction b = reference::hl_maximal(f, params);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("maximal rejects families that do not cover") {
  const UniformGrid g = make_grid(1, 4.0, 32);
  CubeFamily fam{g, "partial", {}};
  Cube q;
  q.corner[0] = 0;
  q.sides[0] = 8;
  fam.cubes.push_back(q);
  const SampledFunction f = random_function(g, 3, false);
  CHECK_THROWS_AS(hl_maximal(f, MaximalParams{1.0, std::make_shared<CubeFamily>(fam)}),
                  contract_violation);
}

TEST_CASE("sharp maximal: constants vanish, 2M dominates, sign matches brute force") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  const MaximalParams params = make_maximal_params(cube_family(g, Exhaustive1d{}));

  const SampledFunction c =
      sample([](std::span<const double>) { return 3.0; }, g, "c");
  for (double v : sharp_maximal(c, params).samples) CHECK(std::abs(v) <= 1e-13);

  const SampledFunction f = random_function(g, 5, false);
  const SampledFunction sharp = sharp_maximal(f, params);
  const SampledFunction m = hl_maximal(f, params);
  for (std::size_t i = 0; i < sharp.samples.size(); ++i)
    CHECK(sharp.samples[i] <= 2.0 * m.samples[i] + 1e-12);

  const SampledFunction sgn =
      sample([](std::span<const double> x) { return x[0] > 0 ? 1.0 : -1.0; }, g, "sign");
  const SampledFunction ssharp = sharp_maximal(sgn, params);
  const SampledFunction sbrute = reference::sharp_maximal(sgn, params);
  for (std::size_t i = 0; i < ssharp.samples.size(); ++i)
    CHECK(ssharp.samples[i] == sbrute.samples[i]);
  // near the jump the mean oscillation reaches 1 on symmetric intervals
  CHECK(ssharp[127] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(ssharp[128] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("delta-power variants: M_1 = M exactly, scaling invariance") {
  const UniformGrid g = make_grid(1, 8.0, 128);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  const SampledFunction f = random_function(g, 77, false);
  const SampledFunction m1 = hl_maximal(f, MaximalParams{1.0, std::make_shared<CubeFamily>(fam)});
  const SampledFunction m = hl_maximal(f, make_maximal_params(fam));
  for (std::size_t i = 0; i < m.samples.size(); ++i) CHECK(m1.samples[i] == m.samples[i]);

  const SampledFunction mhalf =
      hl_maximal(f, MaximalParams{0.5, std::make_shared<CubeFamily>(fam)});
  for (double v : mhalf.samples) CHECK(v >= 0.0);
}

TEST_CASE("sublinearity: M(f+g) <= Mf + Mg") {
  const UniformGrid g = make_grid(1, 4.0, 128);
  const MaximalParams params = make_maximal_params(cube_family(g, Exhaustive1d{}));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SampledFunction f = random_function(g, 200 + 2 * seed, false);
    const SampledFunction h = random_function(g, 201 + 2 * seed, false);
    SampledFunction fh = f;
    for (std::size_t i = 0; i < fh.samples.size(); ++i) fh.samples[i] += h.samples[i];
    const SampledFunction mfh = hl_maximal(fh, params);
    const SampledFunction mf = hl_maximal(f, params);
    const SampledFunction mh = hl_maximal(h, params);
    for (std::size_t i = 0; i < mfh.samples.size(); ++i)
      CHECK(mfh.samples[i] <= mf.samples[i] + mh.samples[i] + 1e-12);
  }
}

TEST_CASE("muckenhoupt envelope: at least 1 for normalized Gaussians") {
  const UniformGrid g = make_grid(1, 8.0, 512);
  const WeightSpec w = WeightSpec::constant(1.0, 1);
  const SampledFunction ws = eval_weight(w, g);
  const MaximalParams params = make_maximal_params(cube_family(g, Exhaustive1d{}));
  std::vector<SampledFunction> probes;
  for (double sc : {0.5, 1.0, 2.0}) {
    SampledFunction f = sample(
        [sc](std::span<const double> x) { return std::exp(-x[0] * x[0] / (sc * sc)); },
        g);
    const double n = weighted_norm(f, 2.0, ws);
    for (double& v : f.samples) v /= n;
    probes.push_back(std::move(f));
  }
  const double env = muckenhoupt_ratio(2.0, w, probes, params);
  CHECK(env >= 1.0 - 1e-10);
  CHECK(env < 10.0);
}

TEST_CASE("Fefferman-Stein ratio: finite, scale-invariant, degenerate flagged") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  const MaximalParams params = make_maximal_params(cube_family(g, Exhaustive1d{}));
  const WeightSpec w = WeightSpec::constant(1.0, 1);

  SampledFunction f = make_zero(g, "cellbump");
  f[100] = 1.0;
  const FsRatio r = fefferman_stein_ratio(f, 2.0, 1.0, w, params);
  CHECK_FALSE(r.degenerate);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);

  SampledFunction cf = f;
  for (double& v : cf.samples) v *= 37.0;
  const FsRatio rc = fefferman_stein_ratio(cf, 2.0, 1.0, w, params);
  CHECK(rc.ratio == doctest::Approx(r.ratio).epsilon(1e-12));

  const SampledFunction c =
      sample([](std::span<const double>) { return 2.0; }, g, "c");
  CHECK(fefferman_stein_ratio(c, 2.0, 1.0, w, params).degenerate);
}

TEST_CASE("mixed-norm Fefferman-Stein ratio is finite on a smooth bump") {
  const UniformGrid g = make_grid(2, 4.0, 32);
  const MaximalParams params = make_maximal_params(cube_family(g, Dyadic{}));
  const SampledFunction f = sample(
      [](std::span<const double> x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1]));
      },
      g);
  const MixedNormParams mixed{2.0, 3.0, WeightSpec::power(0.25, 1),
                              WeightSpec::constant(1.0, 1)};
  const FsRatio r = fefferman_stein_ratio(f, mixed, 0.5, params);
  CHECK_FALSE(r.degenerate);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);
}
