#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fklab/common.hpp"

namespace fklab {

constexpr int kMaxDim = 4;

using Point = std::array<double, kMaxDim>;
using Index = std::array<int, kMaxDim>;

/// Uniform truncated grid on [-L, L]^dim. Sample points are cell centers
/// x_i = -L + (i + 1/2) * spacing, so no sample hits the origin.
struct UniformGrid {
  int dim = 1;
  double half_width = 1.0;   // L
  int points_per_axis = 2;   // N

  double spacing() const { return 2.0 * half_width / points_per_axis; }

  std::int64_t total_cells() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= points_per_axis;
    return n;
  }

  /// Coordinate of cell i along any axis.
  double coord(int i) const {
    return -half_width + (double(i) + 0.5) * spacing();
  }

  /// Row-major flattening, axis 0 slowest.
  std::int64_t flatten(const Index& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * points_per_axis + idx[a];
    return f;
  }

  Index unflatten(std::int64_t flat) const {
    Index idx{};
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = int(flat % points_per_axis);
      flat /= points_per_axis;
    }
    return idx;
  }

  Point cell_center(std::int64_t flat) const {
    Index idx = unflatten(flat);
    Point x{};
    for (int a = 0; a < dim; ++a) x[a] = coord(idx[a]);
    return x;
  }

  bool operator==(const UniformGrid& o) const = default;
};

UniformGrid make_grid(int dim, double half_width, int points_per_axis);

/// Real samples of a function at the cell centers of a grid.
struct SampledFunction {
  UniformGrid grid;
  std::vector<double> samples;
  std::string label;

  double& operator[](std::int64_t i) { return samples[std::size_t(i)]; }
  double operator[](std::int64_t i) const { return samples[std::size_t(i)]; }
};

SampledFunction make_zero(const UniformGrid& grid, std::string label = "0");

using ScalarField = std::function<double(std::span<const double>)>;

/// Evaluate an analytic function at every cell center. Rejects non-finite
/// values, naming the offending cell.
SampledFunction sample(const ScalarField& fn, const UniformGrid& grid,
                       std::string label = "f");

/// translate(f, h)(x) = f(x + h), zero extension outside the box.
/// h is rounded to the cell lattice; the residual is recorded in the label.
SampledFunction translate(const SampledFunction& f, std::span<const double> h);

/// Zero out cells whose centers satisfy |x| <= R (Euclidean), keeping the
/// tail chi_{B(0,R)^c} f.
SampledFunction tail_restrict(const SampledFunction& f, double R);

/// Axis-parallel box of grid cells: [corner_a, corner_a + side_a) per axis.
/// Policy-generated families are cubes (equal sides); product families of
/// 1-D intervals may be rectangles.
struct Cube {
  Index corner{};
  Index sides{};

  std::int64_t cell_count(int dim) const {
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= sides[a];
    return n;
  }
  bool contains(const Index& idx, int dim) const {
    for (int a = 0; a < dim; ++a)
      if (idx[a] < corner[a] || idx[a] >= corner[a] + sides[a]) return false;
    return true;
  }
};

struct Exhaustive1d {};
struct Dyadic {};
struct Stratified {
  std::int64_t max_count = 0;
  std::uint64_t seed = 0;
};

struct CubePolicy {
  enum class Tag { exhaustive_1d, dyadic, stratified } tag = Tag::dyadic;
  std::int64_t max_count = 0;
  std::uint64_t seed = 0;

  CubePolicy() = default;
  CubePolicy(Exhaustive1d) : tag(Tag::exhaustive_1d) {}
  CubePolicy(Dyadic) : tag(Tag::dyadic) {}
  CubePolicy(Stratified s)
      : tag(Tag::stratified), max_count(s.max_count), seed(s.seed) {}

  std::string describe() const;
};

/// Finite family of grid-aligned cubes; the surrogate for every sup_Q.
struct CubeFamily {
  UniformGrid grid;
  std::string policy;
  std::vector<Cube> cubes;

  std::size_t size() const { return cubes.size(); }
};

CubeFamily cube_family(const UniformGrid& grid, const CubePolicy& policy);

/// All products Q_x x Q_y of two 1-D-or-higher families sharing (L, N).
CubeFamily product_family(const CubeFamily& fx, const CubeFamily& fy);

/// True when every grid cell lies in at least one family cube.
bool covers_grid(const CubeFamily& family);

/// Text serialization: header (dim, L, N, label) + one `index value` row per
/// cell, bit-exact round trip.
void save_function(const SampledFunction& f, std::ostream& os);
SampledFunction load_function(std::istream& is);
void save_function_file(const SampledFunction& f, const std::string& path);
SampledFunction load_function_file(const std::string& path);

}  // namespace fklab
