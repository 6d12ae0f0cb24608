#pragma once

#include "fklab/grid.hpp"
#include "fklab/weights.hpp"

namespace fklab {

/// Parameters of the iterated norm L^p_u(L^q_v): inner exponent q with
/// weight v on the last v.dim axes, outer exponent p with weight u on the
/// first u.dim axes.
struct MixedNormParams {
  double p = 2.0;
  double q = 2.0;
  WeightSpec u;
  WeightSpec v;
};

/// (sum |f|^p w s^d)^{1/p} with midpoint quadrature.
double weighted_norm(const SampledFunction& f, double p, const SampledFunction& w_samples);
double weighted_norm(const SampledFunction& f, double p, const WeightSpec& w);

/// Row-wise inner norm: G(x) = (int |f(x,y)|^q v(y) dy)^{1/q} on the
/// leading-axes grid.
SampledFunction inner_norm(const SampledFunction& f, double q, const WeightSpec& v);
SampledFunction inner_norm(const SampledFunction& f, double q,
                           const SampledFunction& v_samples);

double mixed_norm(const SampledFunction& f, const MixedNormParams& params);

/// Precomputed weight tables for repeated mixed-norm evaluation.
struct MixedNormTables {
  MixedNormParams params;
  SampledFunction u_samples;
  SampledFunction v_samples;
};

MixedNormTables make_mixed_tables(const MixedNormParams& params, const UniformGrid& product_grid);
double mixed_norm(const SampledFunction& f, const MixedNormTables& tables);

}  // namespace fklab
