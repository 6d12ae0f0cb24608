#pragma once

#include <string>
#include <vector>

#include "fklab/compactness.hpp"
#include "fklab/maximal.hpp"

namespace fklab {

struct RdfReport {
  WeightSpec weight;       // Rh as a sampled weight
  double maximal_norm = 0.0;  // the ||M|| used (envelope * margin)
  double slack = 0.0;         // sup ( M(Rh) - 2||M|| Rh )_+ / (2||M|| Rh)
};

/// Rubio de Francia construction Rh = sum_k M^k h / (2||M||)^k, truncated at
/// k_max. Contracts: h <= Rh pointwise and M(Rh) <= 2||M|| Rh (1 + slack).
RdfReport rdf_weight(const SampledFunction& h, double p, const WeightSpec& w,
                     int k_max, const MaximalParams& maximal, double margin = 1.25);

/// Deterministic certified catalog of (u, v) pairs with
/// max([u]_{A_p}, [v]_{A_q}) <= K_cap. Mixes constants, powers, clipped
/// powers, and RdF-factorized weights; rejection-sampled against the family.
std::vector<WeightPair> catalog_generate(double K_cap, double p, double q, int count,
                                         std::uint64_t seed, const UniformGrid& axis_grid,
                                         const CubeFamily& family);

struct RatioEnvelope {
  std::vector<double> axis;    // K values
  std::vector<double> values;  // sup ratio over nested catalogs up to K
  std::string context;
};

/// envelope(K) = max over pairs and catalog weights certified at <= K of
/// ||g||_{L^p_u L^q_v} / ||f||_{L^p_u L^q_v}; catalogs are nested in K so the
/// envelope is nondecreasing by construction.
RatioEnvelope extrapolation_envelope(
    const std::vector<std::pair<SampledFunction, SampledFunction>>& pairs, double p,
    double q, const std::vector<std::pair<double, std::vector<WeightPair>>>& catalogs,
    const UniformGrid& grid, std::string context);

}  // namespace fklab
