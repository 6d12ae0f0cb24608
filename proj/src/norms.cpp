#include "fklab/norms.hpp"

#include <cmath>

namespace fklab {

double weighted_norm(const SampledFunction& f, double p, const SampledFunction& w_samples) {
  require(p >= 1.0, "weighted_norm: p must be >= 1");
  require(f.grid == w_samples.grid, "weighted_norm: grid mismatch");
  const std::int64_t n = f.grid.total_cells();
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    terms[std::size_t(i)] = std::pow(std::abs(f[i]), p) * w_samples[i];
  const double sd = std::pow(f.grid.spacing(), f.grid.dim);
  return std::pow(pairwise_sum(terms) * sd, 1.0 / p);
}

double weighted_norm(const SampledFunction& f, double p, const WeightSpec& w) {
  return weighted_norm(f, p, eval_weight(w, f.grid));
}

SampledFunction inner_norm(const SampledFunction& f, double q,
                           const SampledFunction& v_samples) {
  const UniformGrid& g = f.grid;
  require(g.dim >= 2, "inner_norm: need a product grid (dim >= 2)");
  const int m = v_samples.grid.dim;
  require(m < g.dim, "inner_norm: inner weight consumes all axes");
  require(v_samples.grid.points_per_axis == g.points_per_axis &&
              v_samples.grid.half_width == g.half_width,
          "inner_norm: weight grid mismatch");
  const int nx = g.dim - m;
  const UniformGrid gx = make_grid(nx, g.half_width, g.points_per_axis);
  SampledFunction out = make_zero(gx, "innernorm(" + f.label + ")");
  const std::int64_t rows = gx.total_cells();
  const std::int64_t cols = v_samples.grid.total_cells();
  const double sm = std::pow(g.spacing(), m);
  std::vector<double> terms(static_cast<std::size_t>(cols));
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* row = f.samples.data() + r * cols;
    for (std::int64_t c = 0; c < cols; ++c)
      terms[std::size_t(c)] = std::pow(std::abs(row[c]), q) * v_samples[c];
    out[r] = std::pow(pairwise_sum(terms) * sm, 1.0 / q);
  }
  return out;
}

SampledFunction inner_norm(const SampledFunction& f, double q, const WeightSpec& v) {
  const UniformGrid gv = make_grid(v.dim, f.grid.half_width, f.grid.points_per_axis);
  return inner_norm(f, q, eval_weight(v, gv));
}

double mixed_norm(const SampledFunction& f, const MixedNormParams& params) {
  require(params.u.dim + params.v.dim == f.grid.dim,
          "mixed_norm: weight dims must sum to the grid dim");
  const SampledFunction G = inner_norm(f, params.q, params.v);
  return weighted_norm(G, params.p, params.u);
}

MixedNormTables make_mixed_tables(const MixedNormParams& params,
                                  const UniformGrid& product_grid) {
  require(params.u.dim + params.v.dim == product_grid.dim,
          "make_mixed_tables: weight dims must sum to the grid dim");
  const UniformGrid gu =
      make_grid(params.u.dim, product_grid.half_width, product_grid.points_per_axis);
  const UniformGrid gv =
      make_grid(params.v.dim, product_grid.half_width, product_grid.points_per_axis);
  return MixedNormTables{params, eval_weight(params.u, gu), eval_weight(params.v, gv)};
}

double mixed_norm(const SampledFunction& f, const MixedNormTables& tables) {
  const SampledFunction G = inner_norm(f, tables.params.q, tables.v_samples);
  return weighted_norm(G, tables.params.p, tables.u_samples);
}

}  // namespace fklab
