#include "fklab/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fklab {

std::string ProbeRecipe::describe() const {
  std::ostringstream os;
  os << "probes(scales=";
  for (std::size_t i = 0; i < scale_exponents.size(); ++i)
    os << (i ? "," : "") << scale_exponents[i];
  os << ";base=" << base_scale << ";trans=" << translations_per_axis << "x"
     << translation_extent << ";mods=";
  for (std::size_t i = 0; i < modulation_exponents.size(); ++i)
    os << (i ? "," : "") << modulation_exponents[i];
  os << ";f0=" << base_frequency << ";top=" << (include_top_frequency ? 1 : 0)
     << ";rand=" << random_mixtures << ";seed=" << seed << ")";
  return os.str();
}

std::vector<SampledFunction> make_probes(const ProbeRecipe& recipe,
                                         const UniformGrid& grid) {
  std::vector<SampledFunction> probes;
  const int tpa = std::max(1, recipe.translations_per_axis);

  std::vector<double> centers(std::size_t(tpa), 0.0);
  for (int t = 0; t < tpa; ++t)
    centers[std::size_t(t)] =
        tpa == 1 ? 0.0
                 : -recipe.translation_extent +
                       2.0 * recipe.translation_extent * double(t) / double(tpa - 1);

  std::vector<double> freqs = {0.0};
  for (int k : recipe.modulation_exponents)
    freqs.push_back(recipe.base_frequency * std::exp2(double(k)));
  if (recipe.include_top_frequency)
    freqs.push_back(3.141592653589793238462643 / grid.spacing());

  auto add_probe = [&](double sc, const Point& c, double omega, int axis) {
    std::ostringstream os;
    os << "bump(s=" << sc << ",c=" << c[0];
    if (grid.dim > 1) os << "," << c[1];
    os << ",w=" << omega << ",ax=" << axis << ")";
    const int dim = grid.dim;
    probes.push_back(sample(
        [sc, c, omega, axis, dim](std::span<const double> x) {
          double r2 = 0.0;
          for (int a = 0; a < dim; ++a) {
            const double d = x[std::size_t(a)] - c[std::size_t(a)];
            r2 += d * d;
          }
          double v = std::exp(-0.5 * r2 / (sc * sc));
          if (omega != 0.0) v *= std::cos(omega * x[std::size_t(axis)]);
          return v;
        },
        grid, os.str()));
  };

  for (int j : recipe.scale_exponents) {
    const double sc = recipe.base_scale * std::exp2(double(-j));
    // translation lattice over the leading two axes
    for (int t0 = 0; t0 < tpa; ++t0) {
      for (int t1 = 0; t1 < (grid.dim > 1 ? tpa : 1); ++t1) {
        Point c{};
        c[0] = centers[std::size_t(t0)];
        if (grid.dim > 1) c[1] = centers[std::size_t(t1)];
        for (double omega : freqs) {
          if (omega == 0.0) {
            add_probe(sc, c, 0.0, 0);
          } else {
            add_probe(sc, c, omega, 0);
            if (grid.dim > 1) add_probe(sc, c, omega, 1);
          }
        }
      }
    }
  }

  Rng rng(recipe.seed);
  for (int r = 0; r < recipe.random_mixtures; ++r) {
    struct Atom {
      Point c;
      double sc, amp;
    };
    std::vector<Atom> atoms(3);
    for (Atom& a : atoms) {
      for (int ax = 0; ax < grid.dim; ++ax)
        a.c[std::size_t(ax)] = rng.uniform(-recipe.translation_extent,
                                           recipe.translation_extent);
      a.sc = recipe.base_scale * std::exp2(rng.uniform(-1.0, 1.0));
      a.amp = rng.uniform(-1.0, 1.0);
    }
    const int dim = grid.dim;
    std::ostringstream os;
    os << "mixture#" << r;
    probes.push_back(sample(
        [atoms, dim](std::span<const double> x) {
          double v = 0.0;
          for (const Atom& a : atoms) {
            double r2 = 0.0;
            for (int ax = 0; ax < dim; ++ax) {
              const double d = x[std::size_t(ax)] - a.c[std::size_t(ax)];
              r2 += d * d;
            }
            v += a.amp * std::exp(-0.5 * r2 / (a.sc * a.sc));
          }
          return v;
        },
        grid, os.str()));
  }
  return probes;
}

ProbeFamily normalize_probes(const std::vector<SampledFunction>& probes,
                             const MixedNormTables& tables, ProbeRecipe recipe) {
  require(!probes.empty(), "normalize_probes: empty probe set");
  ProbeFamily fam;
  fam.recipe = std::move(recipe);
  fam.probes.reserve(probes.size());
  for (const SampledFunction& f : probes) {
    const double n = mixed_norm(f, tables);
    require(n > 0.0, "normalize_probes: probe with zero norm");
    SampledFunction g = f;
    for (double& v : g.samples) v /= n;
    const double check = mixed_norm(g, tables);
    ensure(std::abs(check - 1.0) <= 1e-9, "normalize_probes: renormalization drifted");
    fam.probes.push_back(std::move(g));
  }
  return fam;
}

const char* to_string(FkVerdict v) {
  switch (v) {
    case FkVerdict::pass_relative_to_family:
      return "PASS-relative-to-family";
    case FkVerdict::fail:
      return "FAIL";
    case FkVerdict::inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

CompactnessProfile fk_profile(const OperatorSpec& op, const ProbeFamily& probes,
                              const MixedNormTables& tables,
                              const std::vector<double>& R_list,
                              const std::vector<double>& h_list,
                              const FkOptions& options) {
  require(!probes.probes.empty(), "fk_profile: empty probe family");
  require(!R_list.empty() && !h_list.empty(), "fk_profile: empty parameter lists");
  for (std::size_t i = 1; i < R_list.size(); ++i)
    require(R_list[i] > R_list[i - 1], "fk_profile: R_list must increase");

  CompactnessProfile prof;
  std::vector<SampledFunction> images;
  images.reserve(probes.probes.size());
  for (const SampledFunction& f : probes.probes) {
    images.push_back(apply(op, f));
    prof.bound_K = std::max(prof.bound_K, mixed_norm(images.back(), tables));
  }

  for (double R : R_list) {
    double sup = 0.0;
    for (const SampledFunction& tf : images)
      sup = std::max(sup, mixed_norm(tail_restrict(tf, R), tables));
    prof.tail_curve.emplace_back(R, sup);
  }

  const int dim = tables.u_samples.grid.dim + tables.v_samples.grid.dim;
  double floor_modulus = std::numeric_limits<double>::infinity();
  std::size_t floor_witness = SIZE_MAX;
  for (double h : h_list) {
    double sup = 0.0;
    std::size_t arg = 0;
    for (std::size_t pi = 0; pi < images.size(); ++pi) {
      const SampledFunction& tf = images[pi];
      for (int axis = 0; axis < dim; ++axis) {
        std::vector<double> shift(std::size_t(dim), 0.0);
        shift[std::size_t(axis)] = h;
        SampledFunction moved = translate(tf, shift);
        for (std::size_t i = 0; i < moved.samples.size(); ++i)
          moved.samples[i] = tf.samples[i] - moved.samples[i];
        const double v = mixed_norm(moved, tables);
        if (v > sup) {
          sup = v;
          arg = pi;
        }
      }
    }
    prof.modulus_curve.emplace_back(h, sup);
    if (sup < floor_modulus) {
      floor_modulus = sup;
      floor_witness = arg;
    }
  }

  double tail_min = std::numeric_limits<double>::infinity();
  for (auto& [R, v] : prof.tail_curve) tail_min = std::min(tail_min, v);
  double mod_min = std::numeric_limits<double>::infinity();
  for (auto& [h, v] : prof.modulus_curve) mod_min = std::min(mod_min, v);

  prof.floor_fraction_observed = prof.bound_K > 0 ? floor_modulus / prof.bound_K : 0.0;
  std::vector<double> eps_sorted = options.epsilons;
  std::sort(eps_sorted.begin(), eps_sorted.end());
  prof.pass_epsilon = 0.0;
  for (double eps : eps_sorted) {
    if (tail_min <= eps * prof.bound_K && mod_min <= eps * prof.bound_K) {
      prof.pass_epsilon = eps;
      break;
    }
  }
  if (prof.pass_epsilon > 0.0) {
    prof.verdict = FkVerdict::pass_relative_to_family;
  } else if (prof.floor_fraction_observed >= options.floor_fraction) {
    prof.verdict = FkVerdict::fail;
    prof.witness_probe = floor_witness;
  } else {
    prof.verdict = FkVerdict::inconclusive;
  }
  return prof;
}

namespace {

std::vector<double> stars_for(const CompactnessProfile& prof,
                              const std::vector<double>& epsilons) {
  // R*: smallest tested R at or below the threshold (tail is nonincreasing)
  std::vector<double> out;
  for (double eps : epsilons) {
    double star = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [R, v] : prof.tail_curve) {
      if (v <= eps * prof.bound_K) {
        star = R;
        break;
      }
    }
    out.push_back(star);
  }
  return out;
}

std::vector<double> deltas_for(const CompactnessProfile& prof,
                               const std::vector<double>& epsilons) {
  // delta*: largest tested h such that every tested h' <= h stays below the
  // threshold (the Def. 3.3 reading: the bound must hold for all |h| <= delta)
  std::vector<std::pair<double, double>> curve = prof.modulus_curve;
  std::sort(curve.begin(), curve.end());
  std::vector<double> out;
  for (double eps : epsilons) {
    double star = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [h, v] : curve) {
      if (v <= eps * prof.bound_K)
        star = h;
      else
        break;
    }
    out.push_back(star);
  }
  return out;
}

}  // namespace

UniformCompactnessReport uniform_sweep(const OperatorSpec& op,
                                       const std::vector<WeightPair>& catalog,
                                       const ProbeRecipe& recipe, double p, double q,
                                       const UniformGrid& grid,
                                       const std::vector<double>& R_list,
                                       const std::vector<double>& h_list,
                                       double K_cap, const FkOptions& options) {
  require(!catalog.empty(), "uniform_sweep: empty catalog");
  for (const WeightPair& wp : catalog)
    require(std::max(wp.cu, wp.cv) <= K_cap * (1.0 + 1e-9),
            "uniform_sweep: catalog member exceeds K_cap: " + wp.id);

  UniformCompactnessReport rep;
  rep.K_cap = K_cap;
  rep.epsilons = options.epsilons;

  const std::vector<SampledFunction> raw = make_probes(recipe, grid);
  for (const WeightPair& wp : catalog) {
    const MixedNormTables tables =
        make_mixed_tables(MixedNormParams{p, q, wp.u, wp.v}, grid);
    const ProbeFamily fam = normalize_probes(raw, tables, recipe);
    SweepEntry entry;
    entry.weight_id = wp.id;
    entry.profile = fk_profile(op, fam, tables, R_list, h_list, options);
    entry.r_star = stars_for(entry.profile, options.epsilons);
    entry.delta_star = deltas_for(entry.profile, options.epsilons);
    rep.per_weight.push_back(std::move(entry));
  }

  rep.phi_empirical = 0.0;
  for (const SweepEntry& e : rep.per_weight)
    rep.phi_empirical = std::max(rep.phi_empirical, e.profile.bound_K);

  // envelopes over the catalog at shared abscissae
  rep.tail_envelope = rep.per_weight.front().profile.tail_curve;
  rep.modulus_envelope = rep.per_weight.front().profile.modulus_curve;
  for (const SweepEntry& e : rep.per_weight) {
    for (std::size_t i = 0; i < rep.tail_envelope.size(); ++i)
      rep.tail_envelope[i].second =
          std::max(rep.tail_envelope[i].second, e.profile.tail_curve[i].second);
    for (std::size_t i = 0; i < rep.modulus_envelope.size(); ++i)
      rep.modulus_envelope[i].second =
          std::max(rep.modulus_envelope[i].second, e.profile.modulus_curve[i].second);
  }

  for (std::size_t k = 0; k < options.epsilons.size(); ++k) {
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    bool all = true;
    for (const SweepEntry& e : rep.per_weight) {
      if (std::isnan(e.r_star[k]) || std::isnan(e.delta_star[k])) {
        all = false;
        break;
      }
      rmin = std::min(rmin, e.r_star[k]);
      rmax = std::max(rmax, e.r_star[k]);
      dmin = std::min(dmin, e.delta_star[k]);
      dmax = std::max(dmax, e.delta_star[k]);
    }
    rep.r_uniformity.push_back(all ? rmax / rmin
                                   : std::numeric_limits<double>::quiet_NaN());
    rep.delta_uniformity.push_back(all ? dmax / dmin
                                       : std::numeric_limits<double>::quiet_NaN());
  }
  return rep;
}

std::vector<double> uniform_approx_check(const OperatorSpec& op,
                                         const std::vector<OperatorSpec>& approximants,
                                         const std::vector<WeightPair>& catalog,
                                         const ProbeRecipe& recipe, double p, double q,
                                         const UniformGrid& grid) {
  require(!approximants.empty(), "uniform_approx_check: no approximants");
  require(!catalog.empty(), "uniform_approx_check: empty catalog");
  const std::vector<SampledFunction> raw = make_probes(recipe, grid);
  std::vector<double> curve(approximants.size(), 0.0);
  for (const WeightPair& wp : catalog) {
    const MixedNormTables tables =
        make_mixed_tables(MixedNormParams{p, q, wp.u, wp.v}, grid);
    const ProbeFamily fam = normalize_probes(raw, tables, recipe);
    for (const SampledFunction& f : fam.probes) {
      const SampledFunction tf = apply(op, f);
      for (std::size_t j = 0; j < approximants.size(); ++j) {
        SampledFunction diff = apply(approximants[j], f);
        for (std::size_t i = 0; i < diff.samples.size(); ++i)
          diff.samples[i] = tf.samples[i] - diff.samples[i];
        curve[j] = std::max(curve[j], mixed_norm(diff, tables));
      }
    }
  }
  return curve;
}

namespace {

/// Cells whose centers lie strictly inside the centered box [-r, r]^d.
bool in_centered_box(const Point& x, int dim, double r) {
  for (int a = 0; a < dim; ++a)
    if (std::abs(x[std::size_t(a)]) >= r) return false;
  return true;
}

double euclid2(const Point& x, int dim) {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += x[std::size_t(a)] * x[std::size_t(a)];
  return r2;
}

}  // namespace

ProofQuantities proof_quantities(const WeightSpec& w, double R0, double h, double R,
                                 const CubeFamily& family) {
  require(R0 > 1.0, "proof_quantities: R0 must exceed 1");
  require(R > R0, "proof_quantities: R must exceed R0");
  require(h > 0.0, "proof_quantities: h must be positive");
  const UniformGrid& g = family.grid;
  const int d = g.dim;
  const double s = g.spacing();
  require(4.0 * R0 <= g.half_width, "proof_quantities: 4 B0 must fit inside the box");

  const SampledFunction ws = eval_weight(w, g);

  // certified [w]_{A_2}: family sup, plus the B0 boxes themselves
  ProofQuantities out;
  {
    double a2 = ap_constant(w, 2.0, family).constant;
    const BoxSums W(ws);
    SampledFunction inv = ws;
    for (double& v : inv.samples) v = 1.0 / v;
    const BoxSums Winv(inv);
    for (double k : {1.0, 3.0, 4.0}) {
      // centered box of half-width k*R0 as a cube of cells
      const int m = int(std::llround(k * R0 / s));
      Cube q;
      for (int a = 0; a < d; ++a) {
        q.corner[a] = g.points_per_axis / 2 - m;
        q.sides[a] = 2 * m;
      }
      if (q.corner[0] < 0) continue;
      a2 = std::max(a2, W.average(q) * Winv.average(q));
    }
    out.a2 = a2;
  }

  const double cd = std::exp2(double(d + 1));
  out.eps = 1.0 / (cd * out.a2);
  out.q = 2.0 - out.eps;
  out.r1 = 1.0 / (1.0 - out.eps);
  out.r1_conj = 1.0 / out.eps;
  out.r2 = 1.0 + 1.0 / (cd * out.a2 - 1.0);
  out.r2_conj = conjugate_exponent(out.r2);

  const double sd = std::pow(s, d);
  const std::int64_t n = g.total_cells();

  // region integrals
  double int_w_3B0 = 0.0;        // int_{3B0} w
  double int_winv_r1_4B0 = 0.0;  // int_{4B0} w^{-r1}
  double int_winv_r2_4B0 = 0.0;  // int_{4B0} w^{-r2}
  double int_winv_ball_R0 = 0.0; // int_{|x|<R0} w^{-1}
  double tail_3B0 = 0.0;         // int_{(3B0)^c} w / |x|^{2d}
  double tail_R = 0.0;           // int_{|x|>R} w / |x|^{2d}
  for (std::int64_t i = 0; i < n; ++i) {
    const Point x = g.cell_center(i);
    const double wv = ws[i];
    const double r2 = euclid2(x, d);
    if (in_centered_box(x, d, 3.0 * R0)) int_w_3B0 += wv * sd;
    if (in_centered_box(x, d, 4.0 * R0)) {
      int_winv_r1_4B0 += std::pow(wv, -out.r1) * sd;
      int_winv_r2_4B0 += std::pow(wv, -out.r2) * sd;
    } else {
      // nothing
    }
    if (!in_centered_box(x, d, 3.0 * R0)) tail_3B0 += wv / std::pow(r2, d) * sd;
    if (r2 < R0 * R0) int_winv_ball_R0 += (1.0 / wv) * sd;
    if (r2 > R * R) tail_R += wv / std::pow(r2, d) * sd;
  }

  out.I = std::pow(int_winv_r1_4B0, 1.0 / out.r1) * int_w_3B0 *
          std::pow(h, 1.0 / out.r1_conj);
  out.II = std::pow(int_winv_r2_4B0, 1.0 / out.r2) * tail_3B0 *
           std::pow(h, 1.0 / out.r2_conj);
  out.E2 = std::sqrt(int_winv_ball_R0) * std::sqrt(tail_R);

  // E1: B_x realized as a cube of volume h centered at each cell
  {
    const double side = std::pow(h, 1.0 / double(d));
    const int half_lo = int(std::llround(side / s)) / 2;
    const int cells_per_axis = std::max(1, int(std::llround(side / s)));
    double first = 0.0, second = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const Point x = g.cell_center(i);
      const bool in3 = in_centered_box(x, d, 3.0 * R0);
      const double r2 = euclid2(x, d);
      // inner integral over B_x cap 4B0
      const Index ci = g.unflatten(i);
      double inner = 0.0;
      Index idx{};
      Index lo{}, hi{};
      bool any = true;
      for (int a = 0; a < d; ++a) {
        lo[a] = ci[a] - half_lo;
        hi[a] = lo[a] + cells_per_axis;  // half-open
        lo[a] = std::max(lo[a], 0);
        hi[a] = std::min(hi[a], g.points_per_axis);
        if (lo[a] >= hi[a]) any = false;
        idx[a] = lo[a];
      }
      if (any) {
        while (true) {
          Point y{};
          for (int a = 0; a < d; ++a) y[std::size_t(a)] = g.coord(idx[a]);
          if (in_centered_box(y, d, 4.0 * R0))
            inner += (1.0 / ws[g.flatten(idx)]) * sd;
          int a = d - 1;
          while (a >= 0) {
            if (++idx[a] < hi[a]) break;
            idx[a] = lo[a];
            --a;
          }
          if (a < 0) break;
        }
      }
      if (in3)
        first += inner * ws[i] * sd;
      else
        second += inner * ws[i] / std::pow(r2, d) * sd;
    }
    out.E1 = first + second;
  }

  const double vol_4B0 = std::pow(8.0 * R0, d);
  const double R1 = 3.0 * R0;
  out.bound_I = 2.0 * out.a2 * std::pow(vol_4B0, 1.0 + 1.0 / out.r1) *
                std::pow(h, 1.0 / out.r1_conj);
  out.bound_II_shape = std::pow(out.a2, 3.0) * vol_4B0 * vol_4B0 *
                       std::pow(R1, double(d) * (out.q - 2.0)) *
                       std::pow(h, 1.0 / out.r2_conj);
  out.bound_E2_shape = std::pow(out.a2, 3.0) *
                       std::pow(R, 0.5 * double(d) * (out.q - 2.0)) *
                       std::pow(R0, 0.5 * out.q * double(d));
  return out;
}

}  // namespace fklab
