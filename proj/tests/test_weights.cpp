#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "fklab/weights.hpp"

using namespace fklab;

namespace {

// independent exhaustive-interval oracle: running direct sums, no prefix
// tables, no shared scan machinery
double ap_oracle_1d(const SampledFunction& w, double p) {
  const int n = w.grid.points_per_axis;
  const double e = -1.0 / (p - 1.0);
  double best = 0.0;
  for (int a = 0; a < n; ++a) {
    double sw = 0.0, ss = 0.0;
    for (int r = a; r < n; ++r) {
      sw += w[r];
      ss += std::pow(w[r], e);
      const double len = double(r - a + 1);
      best = std::max(best, (sw / len) * std::pow(ss / len, p - 1.0));
    }
  }
  return best;
}

double a1_oracle_1d(const SampledFunction& w) {
  const int n = w.grid.points_per_axis;
  double best = 0.0;
  for (int a = 0; a < n; ++a) {
    double sw = 0.0, mn = 1e300;
    for (int r = a; r < n; ++r) {
      sw += w[r];
      mn = std::min(mn, w[r]);
      best = std::max(best, sw / double(r - a + 1) / mn);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("eval_weight basics") {
  const UniformGrid g = make_grid(1, 8.0, 1024);
  const SampledFunction ones = eval_weight(WeightSpec::constant(1.0, 1), g);
  for (double v : ones.samples) CHECK(v == 1.0);

  const SampledFunction pw = eval_weight(WeightSpec::power(0.5, 1), g);
  const int N = g.points_per_axis;
  for (int i = 0; i < N; ++i) {
    CHECK(pw[i] > 0.0);
    CHECK(pw[i] == doctest::Approx(pw[N - 1 - i]).epsilon(1e-14));
  }

  const UniformGrid g2 = make_grid(2, 8.0, 32);
  const SampledFunction prod = eval_weight(
      WeightSpec::product(WeightSpec::power(0.5, 1), WeightSpec::constant(1.0, 1)), g2);
  for (int i = 0; i < 32; ++i)
    for (int j = 1; j < 32; ++j)
      CHECK(prod[i * 32 + j] == doctest::Approx(prod[i * 32]).epsilon(1e-14));
}

TEST_CASE("unit weight has A_p constant exactly 1") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  for (double p : {1.5, 2.0, 3.0}) {
    const ApReport rep = ap_constant(WeightSpec::constant(1.0, 1), p, fam);
    CHECK(std::abs(rep.constant - 1.0) <= 1e-9);
    CHECK(std::abs(rep.dual_constant - 1.0) <= 1e-9);
  }
}

TEST_CASE("sqrt-power weight matches the independent oracle and the 4/3 floor") {
  const UniformGrid g = make_grid(1, 8.0, 512);
  const WeightSpec w = WeightSpec::power(0.5, 1);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  const ApReport rep = ap_constant(w, 2.0, fam);
  const double oracle = ap_oracle_1d(eval_weight(w, g), 2.0);
  CHECK(rep.constant == doctest::Approx(oracle).epsilon(0.01));
  CHECK(rep.constant >= 4.0 / 3.0 - 1e-3);
  // the argmax interval straddles the singularity asymmetrically
  const Cube q = rep.argmax_cube;
  CHECK(q.corner[0] < 256);
  CHECK(q.corner[0] + q.sides[0] > 256);
}

TEST_CASE("lattice-aligned translation leaves the constant unchanged") {
  const UniformGrid g = make_grid(1, 8.0, 512);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  Point c{};
  c[0] = 2.0;  // 2 is a lattice multiple of spacing 1/32
  const double base = ap_constant(WeightSpec::power(0.5, 1), 2.0, fam).constant;
  const double shifted = ap_constant(WeightSpec::power(0.5, 1, c), 2.0, fam).constant;
  CHECK(shifted == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("duality at p = 2: w and sigma = 1/w have equal constants") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  const WeightSpec w = WeightSpec::clipped_power(1.5, 1);
  SampledFunction inv = eval_weight(w, g);
  for (double& v : inv.samples) v = 1.0 / v;
  const ApReport a = ap_constant(w, 2.0, fam);
  const ApReport b = ap_constant(WeightSpec::sampled(inv, "1/w"), 2.0, fam);
  CHECK(a.constant == doctest::Approx(b.constant).epsilon(1e-13));
  CHECK(a.dual_constant == doctest::Approx(a.constant).epsilon(1e-13));
}

TEST_CASE("enlarging the family never decreases the estimate") {
  const UniformGrid g = make_grid(1, 8.0, 128);
  const WeightSpec w = WeightSpec::power(-0.4, 1);
  CubeFamily small = cube_family(g, Dyadic{});
  CubeFamily large = small;
  const CubeFamily extra = cube_family(g, Stratified{200, 3});
  large.cubes.insert(large.cubes.end(), extra.cubes.begin(), extra.cubes.end());
  CHECK(ap_constant(w, 2.0, large).constant >=
        ap_constant(w, 2.0, small).constant - 1e-15);
  CHECK_THROWS_AS(ap_constant(w, 2.0, CubeFamily{g, "empty", {}}), precondition_error);
}

TEST_CASE("a1 constant: unit weight and oracle agreement") {
  const UniformGrid g = make_grid(1, 8.0, 512);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  CHECK(a1_constant(WeightSpec::constant(1.0, 1), fam) == doctest::Approx(1.0));
  const WeightSpec w = WeightSpec::clipped_power(-0.5, 1);
  CHECK(a1_constant(w, fam) ==
        doctest::Approx(a1_oracle_1d(eval_weight(w, g))).epsilon(0.01));
}

TEST_CASE("A_inf functional: unit weight in [1, 1+tol], dominated by A_2") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  const CubeFamily fam = cube_family(g, Dyadic{});
  const double unit = ainf_constant(WeightSpec::constant(1.0, 1), fam);
  CHECK(unit >= 1.0 - 1e-12);
  CHECK(unit <= 1.0 + 0.2);  // the dyadic-family estimate of a constant is near 1

  const WeightSpec w = WeightSpec::power(0.5, 1);
  const double ainf = ainf_constant(w, fam);
  const double a2 = ap_constant(w, 2.0, fam).constant;
  CHECK(ainf <= a2 * (1.0 + 1e-9));
}

TEST_CASE("A_inf of a tensor product factors over product families") {
  const UniformGrid g1 = make_grid(1, 4.0, 16);
  const CubeFamily fam1 = cube_family(g1, Dyadic{});
  const WeightSpec u = WeightSpec::power(0.5, 1);
  const WeightSpec v = WeightSpec::clipped_power(-0.25, 1);
  const CubeFamily prod = product_family(fam1, fam1);
  const double lhs = ainf_constant(WeightSpec::product(u, v), prod);
  const double rhs = ainf_constant(u, fam1) * ainf_constant(v, fam1);
  CHECK(lhs <= rhs * (1.0 + 1e-9));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("precise openness: unit weight specialization") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  const OpennessReport rep = openness_check(WeightSpec::constant(1.0, 1), 2.0, fam);
  CHECK(rep.epsilon == doctest::Approx(0.25));  // 1/2^{d+1}, d = 1
  CHECK(rep.p_minus_eps_constant == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.ratio_vs_bound == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("precise openness holds for the sqrt weight at p = 2 and p = 3") {
  const UniformGrid g = make_grid(1, 8.0, 512);
  const CubeFamily fam = cube_family(g, Exhaustive1d{});
  const WeightSpec w = WeightSpec::power(0.5, 1);
  const OpennessReport r2 = openness_check(w, 2.0, fam);
  CHECK(r2.ratio_vs_bound <= 1.0 + 1e-6);
  const CubeFamily dy = cube_family(g, Dyadic{});
  const OpennessReport r3 = openness_check(w, 3.0, dy);  // exercises [sigma]_{A_inf}
  CHECK(r3.ratio_vs_bound <= 1.0 + 1e-6);
  CHECK(r3.epsilon < 2.0);
}

TEST_CASE("precise reverse Holder ratios stay below 2") {
  const UniformGrid g = make_grid(1, 8.0, 512);
  const CubeFamily fam = cube_family(g, Dyadic{});
  const ReverseHolderReport unit =
      reverse_holder_check(WeightSpec::constant(1.0, 1), fam);
  CHECK(unit.worst_ratio == doctest::Approx(1.0).epsilon(1e-9));
  for (const WeightSpec& w :
       {WeightSpec::power(0.5, 1), WeightSpec::clipped_power(3.0, 1)}) {
    const ReverseHolderReport rep = reverse_holder_check(w, fam);
    CHECK(rep.worst_ratio <= 2.0 + 1e-6);
    CHECK(rep.r_w > 1.0);
  }
}

TEST_CASE("elementary A_p inequalities never go negative") {
  const UniformGrid g = make_grid(1, 8.0, 256);
  const CubeFamily fam = cube_family(g, Dyadic{});
  const WeightSpec w = WeightSpec::power(0.5, 1);

  Cube Q;
  Q.corner[0] = 64;
  Q.sides[0] = 128;
  std::vector<std::int64_t> all_cells;
  for (int i = 64; i < 192; ++i) all_cells.push_back(i);

  const SampledFunction one =
      sample([](std::span<const double>) { return 1.0; }, g, "1");
  const ElementarySlacks s1 = elementary_ap_checks(w, 2.0, one, Q, all_cells, fam);
  CHECK(s1.function_slack >= -1e-12);
  CHECK(s1.set_slack >= -1e-12);

  // randomized sweep
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    Cube q;
    q.sides[0] = 2 + int(rng.uniform_int(120));
    q.corner[0] = int(rng.uniform_int(256 - q.sides[0]));
    std::vector<std::int64_t> cells;
    for (int i = q.corner[0]; i < q.corner[0] + q.sides[0]; ++i)
      if (rng.uniform() < 0.5) cells.push_back(i);
    if (cells.empty()) cells.push_back(q.corner[0]);
    SampledFunction gfun = make_zero(g, "g");
    for (double& v : gfun.samples) v = rng.uniform();
    const double p = 1.5 + rng.uniform() * 2.0;
    const ElementarySlacks s = elementary_ap_checks(w, p, gfun, q, cells, fam);
    CHECK(s.function_slack >= -1e-10);
    CHECK(s.set_slack >= -1e-10);
  }
  CHECK_THROWS_AS(elementary_ap_checks(w, 2.0, one, Q, {}, fam), precondition_error);
}

TEST_CASE("tensor product constants multiply at worst") {
  const UniformGrid g1 = make_grid(1, 8.0, 128);
  const CubeFamily fam = cube_family(g1, Dyadic{});

  const ProductCheck trivial = product_constant_check(
      WeightSpec::constant(1.0, 1), WeightSpec::constant(1.0, 1), 2.0, fam, fam);
  CHECK(trivial.product_constant == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trivial.slack >= -1e-9);

  const ProductCheck half = product_constant_check(
      WeightSpec::power(0.5, 1), WeightSpec::constant(1.0, 1), 2.0, fam, fam);
  CHECK(half.product_constant == doctest::Approx(half.factor_u).epsilon(1e-9));

  const ProductCheck both = product_constant_check(
      WeightSpec::power(0.5, 1), WeightSpec::power(-1.0 / 3.0, 1), 2.0, fam, fam);
  CHECK(both.slack >= -1e-6);
}
