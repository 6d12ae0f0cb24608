#include "fklab/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fklab {

RdfReport rdf_weight(const SampledFunction& h, double p, const WeightSpec& w,
                     int k_max, const MaximalParams& maximal, double margin) {
  require(k_max >= 1, "rdf_weight: k_max must be at least 1");
  double hmax = 0.0;
  for (double v : h.samples) {
    require(v >= 0.0, "rdf_weight: h must be nonnegative");
    hmax = std::max(hmax, v);
  }
  require(hmax > 0.0, "rdf_weight: h must not vanish identically");

  // empirical ||M||_{L^p(w)} from the probe h itself plus its iterates,
  // inflated by the safety margin
  const SampledFunction ws = eval_weight(w, h.grid);
  double op_norm = 1.0;
  {
    SampledFunction cur = h;
    for (int k = 0; k < 3; ++k) {
      const double before = weighted_norm(cur, p, ws);
      SampledFunction next = hl_maximal(cur, maximal);
      const double after = weighted_norm(next, p, ws);
      op_norm = std::max(op_norm, after / before);
      cur = std::move(next);
    }
  }
  op_norm *= margin;

  const double denom = 2.0 * op_norm;
  SampledFunction rh = h;
  SampledFunction term = h;
  double scale = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    term = hl_maximal(term, maximal);
    scale /= denom;
    for (std::size_t i = 0; i < rh.samples.size(); ++i)
      rh.samples[i] += scale * term.samples[i];
  }
  rh.label = "Rdf(" + h.label + ")";

  RdfReport rep;
  rep.maximal_norm = op_norm;
  const SampledFunction mrh = hl_maximal(rh, maximal);
  double slack = 0.0;
  for (std::size_t i = 0; i < rh.samples.size(); ++i) {
    ensure(rh.samples[i] >= h.samples[i],
           "rdf_weight: majorization h <= Rh violated");
    const double excess = mrh.samples[i] - denom * rh.samples[i];
    if (excess > 0.0) slack = std::max(slack, excess / (denom * rh.samples[i]));
  }
  rep.slack = slack;
  rep.weight = WeightSpec::rdf_generated(rh, rh.label);
  return rep;
}

namespace {

struct Candidate {
  WeightSpec w;
};

std::vector<Candidate> candidate_stream(double K_cap, double p, std::uint64_t seed,
                                        const UniformGrid& grid,
                                        const CubeFamily& family, int needed) {
  std::vector<Candidate> out;
  Rng rng(seed);
  const int dim = grid.dim;
  // constants always certify at 1
  out.push_back({WeightSpec::constant(1.0, dim)});
  if (K_cap < 1.5) {
    while (int(out.size()) < needed)
      out.push_back({WeightSpec::constant(rng.uniform(0.5, 2.0), dim)});
    return out;
  }
  const double amax = 1.0 - 1.0 / (1.0 + 0.5 * K_cap);  // keeps powers inside A_p-ish range
  int rdf_budget = 2;
  while (int(out.size()) < needed) {
    const double pick = rng.uniform();
    if (pick < 0.4) {
      const double a = rng.uniform(-amax, amax);
      out.push_back({WeightSpec::power(a, dim)});
    } else if (pick < 0.75) {
      const double a = rng.uniform(-amax, std::min(3.0, 2.0 * K_cap));
      out.push_back({WeightSpec::clipped_power(a, dim)});
    } else if (pick < 0.9 || rdf_budget == 0) {
      Point c{};
      c[0] = rng.uniform(-1.0, 1.0);
      out.push_back({WeightSpec::power(rng.uniform(-amax, amax), dim, c)});
    } else {
      // RdF-factorized u = w1 * w2^{1-p} from A_1 weights built by the
      // maximal iteration on a random bump mixture
      --rdf_budget;
      ProbeRecipe rec;
      rec.random_mixtures = 2;
      rec.scale_exponents = {};
      rec.seed = rng.next_u64();
      std::vector<SampledFunction> mix = make_probes(rec, grid);
      for (SampledFunction& m : mix)
        for (double& v : m.samples) v = std::abs(v) + 0.05;
      const MaximalParams mp = make_maximal_params(family, 1.0);
      const RdfReport w1 = rdf_weight(mix[0], p, WeightSpec::constant(1.0, dim), 6, mp);
      const RdfReport w2 = rdf_weight(mix[1], p, WeightSpec::constant(1.0, dim), 6, mp);
      SampledFunction comp = *w1.weight.table;
      const SampledFunction& t2 = *w2.weight.table;
      for (std::size_t i = 0; i < comp.samples.size(); ++i)
        comp.samples[i] *= std::pow(t2.samples[i], 1.0 - p);
      // normalize the scale to keep values near 1
      double mean = pairwise_sum(comp.samples) / double(comp.samples.size());
      for (double& v : comp.samples) v /= mean;
      out.push_back({WeightSpec::rdf_generated(comp, "rdf-factorized")});
    }
  }
  return out;
}

}  // namespace

std::vector<WeightPair> catalog_generate(double K_cap, double p, double q, int count,
                                         std::uint64_t seed, const UniformGrid& axis_grid,
                                         const CubeFamily& family) {
  require(K_cap >= 1.0, "catalog_generate: K_cap must be at least 1");
  require(count >= 1, "catalog_generate: count must be positive");

  const int attempts_budget = 40 * count;
  std::vector<WeightSpec> us, vs;
  int attempts = 0;
  std::uint64_t salt = 0;
  auto certify = [&](double exponent, std::vector<WeightSpec>& into) {
    while (int(into.size()) < count && attempts < attempts_budget) {
      const auto cands = candidate_stream(K_cap, exponent, seed + salt, axis_grid,
                                          family, 4);
      ++salt;
      for (const Candidate& c : cands) {
        ++attempts;
        if (int(into.size()) >= count) break;
        double constant = 0.0;
        try {
          constant = ap_constant(c.w, exponent, family).constant;
        } catch (const std::exception&) {
          continue;
        }
        if (constant <= K_cap * (1.0 + 1e-9)) into.push_back(c.w);
      }
    }
  };
  certify(p, us);
  certify(q, vs);

  std::vector<WeightPair> out;
  const int n = int(std::min(us.size(), vs.size()));
  for (int i = 0; i < n && int(out.size()) < count; ++i) {
    WeightPair wp;
    wp.u = us[std::size_t(i)];
    wp.v = vs[std::size_t(i)];
    wp.cu = ap_constant(wp.u, p, family).constant;
    wp.cv = ap_constant(wp.v, q, family).constant;
    std::ostringstream id;
    id << "pair" << i << "[" << wp.u.label << ";" << wp.v.label << "]";
    wp.id = id.str();
    out.push_back(std::move(wp));
  }
  // partial catalogs are allowed but flagged by the caller via size()
  return out;
}

RatioEnvelope extrapolation_envelope(
    const std::vector<std::pair<SampledFunction, SampledFunction>>& pairs, double p,
    double q, const std::vector<std::pair<double, std::vector<WeightPair>>>& catalogs,
    const UniformGrid& grid, std::string context) {
  require(!pairs.empty(), "extrapolation_envelope: empty pair family");
  RatioEnvelope env;
  env.context = std::move(context);
  double running = 0.0;
  for (const auto& [K, cat] : catalogs) {
    for (const WeightPair& wp : cat) {
      const MixedNormTables tables =
          make_mixed_tables(MixedNormParams{p, q, wp.u, wp.v}, grid);
      for (const auto& [f, gfn] : pairs) {
        const double nf = mixed_norm(f, tables);
        require(nf > 0.0, "extrapolation_envelope: pair with vanishing ||f||");
        running = std::max(running, mixed_norm(gfn, tables) / nf);
      }
    }
    env.axis.push_back(K);
    env.values.push_back(running);  // nested sup: never decreases
  }
  return env;
}

}  // namespace fklab
