#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fklab/grid.hpp"

namespace fklab {

/// Analytic-or-sampled description of a positive weight.
struct WeightSpec {
  enum class Kind { constant, power, clipped_power, product, sampled, rdf_generated };

  Kind kind = Kind::constant;
  int dim = 1;
  std::string label = "1";
  double c = 1.0;                      // constant
  double alpha = 0.0;                  // power / clipped_power exponent
  Point center{};                      // power / clipped_power center
  std::shared_ptr<const WeightSpec> u, v;          // product factors
  std::shared_ptr<const SampledFunction> table;    // sampled / rdf_generated

  double eval(std::span<const double> x) const;

  static WeightSpec constant(double value, int dim = 1);
  static WeightSpec power(double alpha, int dim = 1, Point center = {});
  static WeightSpec clipped_power(double alpha, int dim = 1, Point center = {});
  static WeightSpec product(WeightSpec un, WeightSpec vm);
  static WeightSpec sampled(SampledFunction samples, std::string label = "");
  static WeightSpec rdf_generated(SampledFunction samples, std::string label);
};

/// Evaluate on a grid; rejects non-positive or non-finite samples naming the
/// cell. For sampled kinds the grids must agree.
SampledFunction eval_weight(const WeightSpec& w, const UniformGrid& grid);

/// Prefix-sum table over grid cells (1-D prefix or 2-D summed-area) giving
/// O(1) sums over axis-parallel boxes.
class BoxSums {
 public:
  BoxSums() = default;
  explicit BoxSums(const SampledFunction& f);

  /// Plain sum of samples over the cube's cells.
  double sum(const Cube& q) const;
  /// Average of samples over the cube's cells (= Lebesgue average).
  double average(const Cube& q) const {
    return sum(q) / double(q.cell_count(dim_));
  }

  int dim() const { return dim_; }

 private:
  int dim_ = 0;
  int n_ = 0;
  std::vector<double> table_;
};

struct ApReport {
  double p = 2.0;
  double constant = 1.0;
  Cube argmax_cube;
  std::size_t argmax_index = 0;
  std::string family;          // provenance
  std::size_t family_size = 0;
  double dual_constant = 1.0;  // [sigma]_{A_{p'}}, sigma = w^{1-p'}
};

struct OpennessReport {
  double p = 2.0;
  double epsilon = 0.0;
  double base_constant = 1.0;         // [w]_{A_p}
  double p_minus_eps_constant = 1.0;  // [w]_{A_{p-eps}}
  double ratio_vs_bound = 0.0;        // [w]_{A_{p-eps}} / (2^{p-1} [w]_{A_p})
};

struct ReverseHolderReport {
  double ainf = 1.0;
  double r_w = 2.0;  // 1 + 1/(2^{d+1} [w]_{A_inf} - 1)
  double worst_ratio = 1.0;
  std::size_t argmax_index = 0;
};

/// [w]_{A_p} = sup_Q (avg_Q w)(avg_Q w^{1-p'})^{p-1} over the family.
ApReport ap_constant(const WeightSpec& w, double p, const CubeFamily& cubes);

/// A_1 constant: sup_Q (avg_Q w) / (min_Q w).
double a1_constant(const WeightSpec& w, const CubeFamily& cubes);

/// Fujii-Wilson functional: sup_Q (1/w(Q)) int_Q M(w chi_Q), with the inner
/// maximal ranging over the same family clipped to the grid box.
double ainf_constant(const WeightSpec& w, const CubeFamily& cubes);

/// Precise openness: eps = (p-1)/(2^{d+1}[sigma]_{A_inf}); for p = 2 the
/// specialization eps = 1/(2^{d+1}[w]_{A_2}).
OpennessReport openness_check(const WeightSpec& w, double p, const CubeFamily& cubes);

/// Precise reverse Holder at r_w = 1 + 1/(2^{d+1}[w]_{A_inf} - 1); the
/// worst ratio (avg w^{r})^{1/r} / avg w should not exceed 2.
ReverseHolderReport reverse_holder_check(const WeightSpec& w, const CubeFamily& cubes,
                                         std::optional<double> ainf = {});

/// Slacks (RHS - LHS) of the two elementary A_p inequalities on a cube Q and
/// a cell subset E of Q; both must be >= 0 up to roundoff.
struct ElementarySlacks {
  double function_slack = 0.0;  // avg_Q g <= [w]^{1/p} ((1/w(Q)) int_Q g^p w)^{1/p}
  double set_slack = 0.0;       // w(Q) <= [w] (|Q|/|E|)^p w(E)
};
ElementarySlacks elementary_ap_checks(const WeightSpec& w, double p,
                                      const SampledFunction& g, const Cube& Q,
                                      const std::vector<std::int64_t>& E_cells,
                                      const CubeFamily& cubes);

/// Tensor-product bound over product cubes:
/// [u (x) v]_{A_q} <= [u]_{A_q} [v]_{A_q} + tol.
struct ProductCheck {
  double product_constant = 1.0;
  double factor_u = 1.0;
  double factor_v = 1.0;
  double slack = 0.0;  // factor_u * factor_v - product_constant
};
ProductCheck product_constant_check(const WeightSpec& u, const WeightSpec& v, double q,
                                    const CubeFamily& fam_u, const CubeFamily& fam_v);

/// One certified catalog entry: a weight with its constant at the target p.
struct CatalogEntry {
  WeightSpec weight;
  double p = 2.0;
  double constant = 1.0;
  std::string family;
};

void save_catalog(const std::vector<CatalogEntry>& entries, const std::string& path);

}  // namespace fklab
