#include "fklab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fklab {

namespace {

std::vector<double> abs_delta_samples(const SampledFunction& f, double delta) {
  std::vector<double> g(f.samples.size());
  if (delta == 1.0) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::abs(f.samples[i]);
  } else {
    require(delta > 0.0, "maximal: delta must be positive");
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = std::pow(std::abs(f.samples[i]), delta);
  }
  return g;
}

void finish_delta(SampledFunction& out, double delta) {
  if (delta == 1.0) return;
  for (double& v : out.samples) v = std::pow(v, 1.0 / delta);
}

/// Shared interval-average primitive: both the optimized scan and the brute
/// oracle compute (P[r]-P[a])/(r-a) from the same prefix array, so their
/// candidate sets carry identical floating-point values.
struct Prefix1d {
  std::vector<double> P;
  explicit Prefix1d(std::span<const double> g) : P(g.size() + 1, 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) P[i + 1] = P[i] + g[i];
  }
  double avg(std::int64_t a, std::int64_t r) const {
    return (P[std::size_t(r)] - P[std::size_t(a)]) / double(r - a);
  }
};

/// Max slope from an external point q to a convex chain (hull), which is a
/// unimodal function of the vertex index; narrow by ternary steps and scan
/// the final few vertices.
double max_slope_to_chain(double qx, double qy, std::span<const std::pair<double, double>> chain,
                          bool chain_on_right) {
  auto slope = [&](std::size_t i) {
    const auto& [vx, vy] = chain[i];
    return chain_on_right ? (vy - qy) / (vx - qx) : (qy - vy) / (qx - vx);
  };
  std::size_t lo = 0, hi = chain.size() - 1;
  while (hi - lo > 6) {
    const std::size_t m1 = lo + (hi - lo) / 3;
    const std::size_t m2 = hi - (hi - lo) / 3;
    if (slope(m1) < slope(m2))
      lo = m1 + 1;
    else
      hi = m2;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i <= hi; ++i) best = std::max(best, slope(i));
  return best;
}

void build_upper_hull(std::span<const double> P, std::int64_t from, std::int64_t to,
                      std::vector<std::pair<double, double>>& hull) {
  hull.clear();
  for (std::int64_t r = from; r <= to; ++r) {
    const double x = double(r), y = P[std::size_t(r)];
    while (hull.size() >= 2) {
      const auto& [x1, y1] = hull[hull.size() - 2];
      const auto& [x2, y2] = hull[hull.size() - 1];
      if ((x2 - x1) * (y - y1) - (x - x1) * (y2 - y1) >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.emplace_back(x, y);
  }
}

void build_lower_hull(std::span<const double> P, std::int64_t from, std::int64_t to,
                      std::vector<std::pair<double, double>>& hull) {
  hull.clear();
  for (std::int64_t a = from; a <= to; ++a) {
    const double x = double(a), y = P[std::size_t(a)];
    while (hull.size() >= 2) {
      const auto& [x1, y1] = hull[hull.size() - 2];
      const auto& [x2, y2] = hull[hull.size() - 1];
      if ((x2 - x1) * (y - y1) - (x - x1) * (y2 - y1) <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.emplace_back(x, y);
  }
}

/// Divide and conquer over cells [lo, hi): intervals inside each half recurse,
/// crossing intervals are resolved with hull tangents against the prefix
/// polyline. ans[i] accumulates max avg over intervals containing cell i.
void maximal_scan(const Prefix1d& pre, std::int64_t lo, std::int64_t hi,
                  std::vector<double>& ans,
                  std::vector<std::pair<double, double>>& hull) {
  if (hi - lo == 1) {
    ans[std::size_t(lo)] = std::max(ans[std::size_t(lo)], pre.avg(lo, lo + 1));
    return;
  }
  const std::int64_t mid = lo + (hi - lo) / 2;
  maximal_scan(pre, lo, mid, ans, hull);
  maximal_scan(pre, mid, hi, ans, hull);

  // left cells i in [lo, mid): a in [lo, i], right endpoint r in [mid+1, hi]
  build_upper_hull(pre.P, mid + 1, hi, hull);
  {
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = lo; i < mid; ++i) {
      best = std::max(best, max_slope_to_chain(double(i), pre.P[std::size_t(i)],
                                               hull, /*chain_on_right=*/true));
      ans[std::size_t(i)] = std::max(ans[std::size_t(i)], best);
    }
  }
  // right cells j in [mid, hi): a in [lo, mid-1], r in [j+1, hi]
  build_lower_hull(pre.P, lo, mid - 1, hull);
  {
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t j = hi - 1; j >= mid; --j) {
      best = std::max(best, max_slope_to_chain(double(j + 1), pre.P[std::size_t(j + 1)],
                                               hull, /*chain_on_right=*/false));
      ans[std::size_t(j)] = std::max(ans[std::size_t(j)], best);
    }
  }
}

bool is_exhaustive_1d(const CubeFamily& fam) {
  return fam.grid.dim == 1 && fam.policy == "exhaustive-1d";
}

/// Generic per-cube path: every cube updates the cells it covers with its
/// average. Parallel threads own private buffers merged by max, which is
/// associative, so the result is independent of scheduling.
void family_maximal_into(const CubeFamily& fam, const BoxSums& sums,
                         std::vector<double>& out, bool parallel) {
  const UniformGrid& g = fam.grid;
  const std::int64_t n = g.total_cells();
  out.assign(std::size_t(n), -1.0);
  const std::int64_t m = std::int64_t(fam.cubes.size());

  auto process = [&](std::vector<double>& buf, std::int64_t i) {
    const Cube& q = fam.cubes[std::size_t(i)];
    const double avg = sums.average(q);
    Index idx = q.corner;
    while (true) {
      const std::size_t flat = std::size_t(g.flatten(idx));
      buf[flat] = std::max(buf[flat], avg);
      int a = g.dim - 1;
      while (a >= 0) {
        if (++idx[a] < q.corner[a] + q.sides[a]) break;
        idx[a] = q.corner[a];
        --a;
      }
      if (a < 0) break;
    }
  };

  if (!parallel) {
    for (std::int64_t i = 0; i < m; ++i) process(out, i);
  } else {
#pragma omp parallel
    {
      std::vector<double> local(std::size_t(n), -1.0);
#pragma omp for schedule(static) nowait
      for (std::int64_t i = 0; i < m; ++i) process(local, i);
#pragma omp critical(fklab_family_maximal)
      for (std::size_t k = 0; k < local.size(); ++k)
        out[k] = std::max(out[k], local[k]);
    }
  }
  for (double v : out)
    ensure(v >= 0.0, "hl_maximal: family does not cover every grid cell");
}

void family_sharp_into(const CubeFamily& fam, std::span<const double> gsamples,
                       const BoxSums& sums, std::vector<double>& out, bool parallel) {
  const UniformGrid& g = fam.grid;
  const std::int64_t n = g.total_cells();
  out.assign(std::size_t(n), -1.0);
  const std::int64_t m = std::int64_t(fam.cubes.size());

  auto process = [&](std::vector<double>& buf, std::int64_t i) {
    const Cube& q = fam.cubes[std::size_t(i)];
    const double mean = sums.average(q);
    // mean oscillation needs a per-cell pass
    double osc = 0.0;
    Index idx = q.corner;
    while (true) {
      osc += std::abs(gsamples[std::size_t(g.flatten(idx))] - mean);
      int a = g.dim - 1;
      while (a >= 0) {
        if (++idx[a] < q.corner[a] + q.sides[a]) break;
        idx[a] = q.corner[a];
        --a;
      }
      if (a < 0) break;
    }
    osc /= double(q.cell_count(g.dim));
    idx = q.corner;
    while (true) {
      const std::size_t flat = std::size_t(g.flatten(idx));
      buf[flat] = std::max(buf[flat], osc);
      int a = g.dim - 1;
      while (a >= 0) {
        if (++idx[a] < q.corner[a] + q.sides[a]) break;
        idx[a] = q.corner[a];
        --a;
      }
      if (a < 0) break;
    }
  };

  if (!parallel) {
    for (std::int64_t i = 0; i < m; ++i) process(out, i);
  } else {
#pragma omp parallel
    {
      std::vector<double> local(std::size_t(n), -1.0);
#pragma omp for schedule(static) nowait
      for (std::int64_t i = 0; i < m; ++i) process(local, i);
#pragma omp critical(fklab_family_sharp)
      for (std::size_t k = 0; k < local.size(); ++k)
        out[k] = std::max(out[k], local[k]);
    }
  }
  for (double v : out)
    ensure(v >= 0.0, "sharp_maximal: family does not cover every grid cell");
}

}  // namespace

MaximalParams make_maximal_params(CubeFamily family, double delta) {
  require(delta > 0.0, "make_maximal_params: delta must be positive");
  return MaximalParams{delta, std::make_shared<CubeFamily>(std::move(family))};
}

SampledFunction hl_maximal(const SampledFunction& f, const MaximalParams& params) {
  require(params.family && !params.family->cubes.empty(), "hl_maximal: empty family");
  const CubeFamily& fam = *params.family;
  require(f.grid == fam.grid, "hl_maximal: family grid mismatch");
  const std::vector<double> g = abs_delta_samples(f, params.delta);
  SampledFunction out = make_zero(f.grid, "M(" + f.label + ")");

  if (is_exhaustive_1d(fam)) {
    const Prefix1d pre(g);
    std::vector<std::pair<double, double>> hull;
    hull.reserve(g.size() + 1);
    std::fill(out.samples.begin(), out.samples.end(), 0.0);
    maximal_scan(pre, 0, std::int64_t(g.size()), out.samples, hull);
  } else {
    SampledFunction gs{f.grid, g, ""};
    family_maximal_into(fam, BoxSums(gs), out.samples, /*parallel=*/true);
  }
  finish_delta(out, params.delta);
  return out;
}

SampledFunction sharp_maximal(const SampledFunction& f, const MaximalParams& params) {
  require(params.family && !params.family->cubes.empty(), "sharp_maximal: empty family");
  const CubeFamily& fam = *params.family;
  require(f.grid == fam.grid, "sharp_maximal: family grid mismatch");
  // M^# acts on f itself; the delta-power variant oscillates |f|^delta
  const std::vector<double> g =
      params.delta == 1.0 ? f.samples : abs_delta_samples(f, params.delta);
  SampledFunction gs{f.grid, g, ""};
  SampledFunction out = make_zero(f.grid, "M#(" + f.label + ")");
  family_sharp_into(fam, g, BoxSums(gs), out.samples, /*parallel=*/true);
  finish_delta(out, params.delta);
  return out;
}

namespace reference {

SampledFunction hl_maximal(const SampledFunction& f, const MaximalParams& params) {
  require(params.family && !params.family->cubes.empty(), "hl_maximal: empty family");
  const CubeFamily& fam = *params.family;
  const std::vector<double> g = abs_delta_samples(f, params.delta);
  SampledFunction out = make_zero(f.grid, "Mref(" + f.label + ")");
  if (is_exhaustive_1d(fam)) {
    // same prefix-average primitive, exhaustive O(N^3) interval sweep
    const Prefix1d pre(g);
    const std::int64_t n = std::int64_t(g.size());
    std::vector<double>& ans = out.samples;
    std::fill(ans.begin(), ans.end(), 0.0);
    for (std::int64_t a = 0; a < n; ++a)
      for (std::int64_t r = a + 1; r <= n; ++r) {
        const double avg = pre.avg(a, r);
        for (std::int64_t i = a; i < r; ++i)
          ans[std::size_t(i)] = std::max(ans[std::size_t(i)], avg);
      }
  } else {
    SampledFunction gs{f.grid, g, ""};
    family_maximal_into(fam, BoxSums(gs), out.samples, /*parallel=*/false);
  }
  finish_delta(out, params.delta);
  return out;
}

SampledFunction sharp_maximal(const SampledFunction& f, const MaximalParams& params) {
  require(params.family && !params.family->cubes.empty(), "sharp_maximal: empty family");
  const CubeFamily& fam = *params.family;
  const std::vector<double> g =
      params.delta == 1.0 ? f.samples : abs_delta_samples(f, params.delta);
  SampledFunction gs{f.grid, g, ""};
  SampledFunction out = make_zero(f.grid, "M#ref(" + f.label + ")");
  family_sharp_into(fam, g, BoxSums(gs), out.samples, /*parallel=*/false);
  finish_delta(out, params.delta);
  return out;
}

}  // namespace reference

double muckenhoupt_ratio(double p, const WeightSpec& w,
                         const std::vector<SampledFunction>& probes,
                         const MaximalParams& params) {
  require(!probes.empty(), "muckenhoupt_ratio: empty probe set");
  const SampledFunction ws = eval_weight(w, params.family->grid);
  double envelope = 0.0;
  for (const SampledFunction& f : probes) {
    const double nf = weighted_norm(f, p, ws);
    require(std::abs(nf - 1.0) <= 1e-6,
            "muckenhoupt_ratio: probe not L^p(w)-normalized");
    envelope = std::max(envelope, weighted_norm(hl_maximal(f, params), p, ws));
  }
  return envelope;
}

FsRatio fefferman_stein_ratio(const SampledFunction& f, const MixedNormParams& mixed,
                              double delta, const MaximalParams& params) {
  const MaximalParams pd{delta, params.family};
  const SampledFunction num = hl_maximal(f, pd);
  const SampledFunction den = sharp_maximal(f, pd);
  FsRatio r;
  r.numerator = mixed_norm(num, mixed);
  r.denominator = mixed_norm(den, mixed);
  if (r.denominator <= 1e-14 * std::max(1.0, r.numerator)) {
    r.degenerate = true;
    return r;
  }
  r.ratio = r.numerator / r.denominator;
  return r;
}

FsRatio fefferman_stein_ratio(const SampledFunction& f, double p, double delta,
                              const WeightSpec& w, const MaximalParams& params) {
  const SampledFunction ws = eval_weight(w, f.grid);
  const MaximalParams pd{delta, params.family};
  const SampledFunction num = hl_maximal(f, pd);
  const SampledFunction den = sharp_maximal(f, pd);
  FsRatio r;
  r.numerator = weighted_norm(num, p, ws);
  r.denominator = weighted_norm(den, p, ws);
  if (r.denominator <= 1e-14 * std::max(1.0, r.numerator)) {
    r.degenerate = true;
    return r;
  }
  r.ratio = r.numerator / r.denominator;
  return r;
}

}  // namespace fklab
