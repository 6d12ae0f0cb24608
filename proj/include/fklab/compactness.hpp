#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fklab/norms.hpp"
#include "fklab/operators.hpp"

namespace fklab {

/// Finite adversarial surrogate for the unit ball: scaled, translated,
/// cosine-modulated Gaussian bumps (plus optional top-frequency witnesses and
/// seeded random mixtures), renormalized per weight pair.
struct ProbeRecipe {
  std::vector<int> scale_exponents = {0, 1};      // scale = base_scale * 2^{-j}
  double base_scale = 1.0;
  int translations_per_axis = 3;                  // lattice translations
  double translation_extent = 2.0;                // centers in [-extent, extent]
  std::vector<int> modulation_exponents = {};     // omega = base_frequency * 2^k
  double base_frequency = 1.0;
  bool include_top_frequency = false;             // omega = pi / spacing witness
  int random_mixtures = 0;
  std::uint64_t seed = 1;

  std::string describe() const;
};

/// Unnormalized probe set; deterministic in (recipe, grid).
std::vector<SampledFunction> make_probes(const ProbeRecipe& recipe, const UniformGrid& grid);

/// Probes scaled to mixed-norm 1 under the active (p, q, u, v).
struct ProbeFamily {
  ProbeRecipe recipe;
  std::vector<SampledFunction> probes;  // normalized
};
ProbeFamily normalize_probes(const std::vector<SampledFunction>& probes,
                             const MixedNormTables& tables, ProbeRecipe recipe);

enum class FkVerdict { pass_relative_to_family, fail, inconclusive };
const char* to_string(FkVerdict v);

struct FkOptions {
  std::vector<double> epsilons = {0.5, 0.2, 0.1, 0.05};
  double floor_fraction = 0.5;  // FAIL when min_h modulus >= fraction * bound_K
};

struct CompactnessProfile {
  double bound_K = 0.0;
  std::vector<std::pair<double, double>> tail_curve;     // (R, sup tail norm)
  std::vector<std::pair<double, double>> modulus_curve;  // (|h|, sup shift norm)
  FkVerdict verdict = FkVerdict::inconclusive;
  double pass_epsilon = 0.0;             // smallest passed epsilon (0 if none)
  std::size_t witness_probe = SIZE_MAX;  // FAIL witness
  double floor_fraction_observed = 0.0;
};

/// Tail / translation-modulus curves of op over the probe family; PASS/FAIL
/// is always relative to the finite family.
CompactnessProfile fk_profile(const OperatorSpec& op, const ProbeFamily& probes,
                              const MixedNormTables& tables,
                              const std::vector<double>& R_list,
                              const std::vector<double>& h_list,
                              const FkOptions& options = {});

/// One certified catalog pair for the sweeps.
struct WeightPair {
  std::string id;
  WeightSpec u, v;
  double cu = 1.0, cv = 1.0;  // certified constants at the active (p, q)
};

struct SweepEntry {
  std::string weight_id;
  CompactnessProfile profile;
  // per epsilon (aligned with options.epsilons): smallest R achieving the
  // threshold and largest prefix-valid h; NaN when not attained
  std::vector<double> r_star;
  std::vector<double> delta_star;
};

struct UniformCompactnessReport {
  double K_cap = 1.0;
  std::vector<double> epsilons;
  std::vector<SweepEntry> per_weight;
  std::vector<double> r_uniformity;      // max/min R* across catalog, per eps
  std::vector<double> delta_uniformity;  // max/min delta* across catalog
  double phi_empirical = 0.0;            // max bound_K over the catalog
  std::vector<std::pair<double, double>> tail_envelope;
  std::vector<std::pair<double, double>> modulus_envelope;
};

UniformCompactnessReport uniform_sweep(const OperatorSpec& op,
                                       const std::vector<WeightPair>& catalog,
                                       const ProbeRecipe& recipe, double p, double q,
                                       const UniformGrid& grid,
                                       const std::vector<double>& R_list,
                                       const std::vector<double>& h_list,
                                       double K_cap, const FkOptions& options = {});

/// Per approximant j: sup over catalog and probes of ||Tf - T_j f||.
std::vector<double> uniform_approx_check(const OperatorSpec& op,
                                         const std::vector<OperatorSpec>& approximants,
                                         const std::vector<WeightPair>& catalog,
                                         const ProbeRecipe& recipe, double p, double q,
                                         const UniformGrid& grid);

/// The Step-3 commutator-compactness proof quantities and their majorants.
struct ProofQuantities {
  double a2 = 1.0;    // certified [w]_{A_2} (family plus the B_0 boxes)
  double eps = 0.0;   // 1 / (2^{d+1} [w]_{A_2})
  double q = 2.0;     // 2 - eps
  double r1 = 1.0, r1_conj = 0.0;
  double r2 = 1.0, r2_conj = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  double I = 0.0;
  double II = 0.0;
  double bound_I = 0.0;         // 2 [w] |4B0|^{1+1/r1} |h|^{1/r1'} (explicit constant)
  double bound_II_shape = 0.0;  // [w]^3 |4B0|^2 R1^{d(q-2)} |h|^{1/r2'} (fitted)
  double bound_E2_shape = 0.0;  // [w]^3 R^{d(q-2)/2} R0^{qd/2} (fitted)
};

ProofQuantities proof_quantities(const WeightSpec& w, double R0, double h, double R,
                                 const CubeFamily& family);

}  // namespace fklab
