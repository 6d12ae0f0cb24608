#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fklab/grid.hpp"
#include "fklab/maximal.hpp"

namespace fklab {

/// Translation-invariant singular kernel K(x, y) = profile(x - y), with the
/// regularity constant of |d^beta K| <= C_K |x-y|^{-d-|beta|}, |beta| <= 1.
struct KernelSpec {
  std::string label;
  int dim = 1;
  double ck = 0.0;           // certified regularity constant
  double homogeneity = 0.0;  // -d for the catalog kernels
  std::function<double(std::span<const double>)> profile;
};

/// 1-D principal-value kernel 1/z.
KernelSpec hilbert_kernel();
/// Riesz-type kernel z_j / |z|^{d+1} on R^d.
KernelSpec riesz_kernel(int axis, int dim);
/// Smooth truncation K^eta = K * ramp(|z|/eta) (ramp vanishes on [0,1] and
/// equals 1 on [2,inf)); ck is re-measured on the truncated profile.
KernelSpec truncate_kernel(const KernelSpec& base, double eta);

struct KernelCertification {
  double measured_size = 0.0;      // max |K(z)| |z|^d
  double measured_gradient = 0.0;  // max |dK(z)| |z|^{d+1}
  double measured_ck = 0.0;
  bool within_declared = false;
};
KernelCertification certify_kernel(const KernelSpec& k, double r_min, double r_max,
                                   int radii = 24, int directions = 16);

/// Pseudodifferential symbol sigma(x, xi) with derivative envelopes
/// |d^alpha_x d^beta_xi sigma| <= envelope(alpha,beta,x,xi) (1+|xi|)^{-|beta|}.
struct SymbolSpec {
  std::string label;
  int dim = 1;
  std::function<double(std::span<const double>, std::span<const double>)> sigma;
  // optional rank-1 structure sigma = sep_x(x) * sep_xi(xi); enables the
  // fast multiplier path
  std::function<double(std::span<const double>)> sep_x;
  std::function<double(std::span<const double>)> sep_xi;
  std::function<double(const Index&, const Index&, std::span<const double>,
                       std::span<const double>)>
      envelope;
  bool decays = false;
};

/// Cordes-class Gaussian symbol exp(-(|x|^2+|xi|^2)/s^2).
SymbolSpec cordes_gaussian(double scale, int dim);
/// sigma == 1 (negative control: reproduces the identity).
SymbolSpec unit_symbol(int dim);

struct SymbolCertification {
  double worst_excess = 0.0;  // max over samples of |FD| / bound
  bool ok = false;
};
SymbolCertification certify_symbol(const SymbolSpec& s, double extent, int samples_per_axis);

/// Tagged description of the operator under test.
struct OperatorSpec {
  enum class Kind { identity, multiply, cz, truncated_cz, commutator, pseudo };

  Kind kind = Kind::identity;
  std::string label = "identity";
  SampledFunction b;      // multiply / commutator symbol
  KernelSpec kernel;      // cz / truncated_cz (already truncated)
  double eta = 0.0;       // truncated_cz
  std::shared_ptr<const OperatorSpec> inner;  // commutator
  SymbolSpec symbol;      // pseudo

  static OperatorSpec identity();
  static OperatorSpec multiply(SampledFunction b);
  static OperatorSpec cz(KernelSpec kernel);
  static OperatorSpec truncated_cz(KernelSpec base, double eta, double spacing);
  static OperatorSpec commutator(SampledFunction b, OperatorSpec inner);
  static OperatorSpec pseudo(SymbolSpec symbol);
};

/// Production application: FFT convolution for kernels, multiplier path for
/// rank-1 symbols, direct quadrature otherwise.
SampledFunction apply(const OperatorSpec& op, const SampledFunction& f);

/// Direct quadrature (principal value: diagonal cell excluded, opposite
/// offsets summed in pairs); OpenMP over output cells.
SampledFunction apply_direct(const OperatorSpec& op, const SampledFunction& f);

namespace reference {
/// Single-thread direct quadrature, kept as the oracle.
SampledFunction apply(const OperatorSpec& op, const SampledFunction& f);
}  // namespace reference

/// BMO norm over the family: sup_Q avg_Q |b - b_Q|.
double bmo_norm(const SampledFunction& b, const CubeFamily& cubes);

/// b mollified at scale 2^{-j} and smoothly cut off at radius 2^j.
SampledFunction cmo_approximant(const SampledFunction& b, int j);

/// Distance-to-CMO curve: j -> bmo_norm(b - b_j).
std::vector<std::pair<int, double>> cmo_distance(const SampledFunction& b,
                                                 const std::vector<int>& scales,
                                                 const CubeFamily& cubes);

struct CzoNorm {
  double l2_envelope = 0.0;
  double ck = 0.0;
  double total = 0.0;
};
/// ||T||_{CZO} = empirical L^2 envelope over probes + certified C_K
/// (sup |sigma| stands in for kernel-free pseudo operators).
CzoNorm czo_norm_estimate(const OperatorSpec& op, const std::vector<SampledFunction>& probes);

struct TruncationFit {
  std::vector<double> etas;
  std::vector<double> fitted;  // max |C_b f - C_b^eta f| / (eta |grad b| Mf)
  bool stable = false;         // max/min fitted <= 2
  bool inconsistent = false;   // Mf = 0 under a nonzero numerator
};
TruncationFit truncation_error_check(const KernelSpec& kernel, const SampledFunction& b,
                                     const std::vector<SampledFunction>& probes,
                                     const std::vector<double>& etas,
                                     const MaximalParams& maximal);

struct CommutatorBoundFit {
  double fitted = 0.0;  // max ||C_b f||_{L2(w)} / (||b||_* ||M^2 f||_{L2(w)})
  double bmo = 0.0;
  bool degenerate = false;
};
CommutatorBoundFit commutator_weighted_bound_check(const SampledFunction& b,
                                                   const OperatorSpec& inner,
                                                   const WeightSpec& w,
                                                   const std::vector<SampledFunction>& probes,
                                                   const MaximalParams& maximal,
                                                   const CubeFamily& bmo_cubes);

}  // namespace fklab
