#pragma once

#include <memory>

#include "fklab/grid.hpp"
#include "fklab/norms.hpp"
#include "fklab/weights.hpp"

namespace fklab {

/// Cubes the maximal supremum ranges over, plus the delta of M_delta.
struct MaximalParams {
  double delta = 1.0;
  std::shared_ptr<const CubeFamily> family;
};

MaximalParams make_maximal_params(CubeFamily family, double delta = 1.0);

/// Uncentered Hardy-Littlewood maximal function over the family
/// (M_delta when delta != 1). The exhaustive-1d policy uses an
/// O(N log N)-class prefix-sum/hull scan; other families update per cube.
SampledFunction hl_maximal(const SampledFunction& f, const MaximalParams& params);

/// Fefferman-Stein sharp maximal M^# (M^#_delta when delta != 1):
/// sup over cubes containing x of the mean oscillation avg_Q |f - f_Q|.
SampledFunction sharp_maximal(const SampledFunction& f, const MaximalParams& params);

namespace reference {
/// Brute-force single-thread scans, kept as the testing oracle; they share
/// the cube-average primitive with the optimized paths so agreement is
/// sample-exact.
SampledFunction hl_maximal(const SampledFunction& f, const MaximalParams& params);
SampledFunction sharp_maximal(const SampledFunction& f, const MaximalParams& params);
}  // namespace reference

/// Empirical operator-norm lower envelope: max over L^p(w)-normalized probes
/// of ||Mf||_{L^p(w)}.
double muckenhoupt_ratio(double p, const WeightSpec& w,
                         const std::vector<SampledFunction>& probes,
                         const MaximalParams& params);

struct FsRatio {
  double ratio = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool degenerate = false;
};

/// ||M_delta f|| / ||M^#_delta f|| in the mixed norm (plain L^p(w) when the
/// params collapse to p = q with a product weight).
FsRatio fefferman_stein_ratio(const SampledFunction& f, const MixedNormParams& mixed,
                              double delta, const MaximalParams& params);
FsRatio fefferman_stein_ratio(const SampledFunction& f, double p, double delta,
                              const WeightSpec& w, const MaximalParams& params);

}  // namespace fklab
