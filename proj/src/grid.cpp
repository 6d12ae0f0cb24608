#include "fklab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fklab {

UniformGrid make_grid(int dim, double half_width, int points_per_axis) {
  require(dim >= 1 && dim <= kMaxDim, "make_grid: dim out of range");
  require(half_width > 0.0, "make_grid: half_width must be positive");
  require(points_per_axis >= 1, "make_grid: points_per_axis must be positive");
  return UniformGrid{dim, half_width, points_per_axis};
}

SampledFunction make_zero(const UniformGrid& grid, std::string label) {
  return SampledFunction{grid, std::vector<double>(std::size_t(grid.total_cells()), 0.0),
                         std::move(label)};
}

SampledFunction sample(const ScalarField& fn, const UniformGrid& grid,
                       std::string label) {
  SampledFunction f = make_zero(grid, std::move(label));
  const std::int64_t n = grid.total_cells();
  for (std::int64_t i = 0; i < n; ++i) {
    const Point x = grid.cell_center(i);
    const double v = fn(std::span<const double>(x.data(), std::size_t(grid.dim)));
    if (!std::isfinite(v)) {
      Index idx = grid.unflatten(i);
      std::ostringstream os;
      os << "sample: non-finite value at cell (";
      for (int a = 0; a < grid.dim; ++a) os << (a ? "," : "") << idx[a];
      os << "), x = (";
      for (int a = 0; a < grid.dim; ++a) os << (a ? "," : "") << x[a];
      os << ")";
      throw precondition_error(os.str());
    }
    f[i] = v;
  }
  return f;
}

SampledFunction translate(const SampledFunction& f, std::span<const double> h) {
  const UniformGrid& g = f.grid;
  require(int(h.size()) == g.dim, "translate: shift dim mismatch");
  const double s = g.spacing();
  Index shift{};
  double residual = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    require(std::abs(h[a]) <= 2.0 * g.half_width,
            "translate: |h| exceeds box width");
    shift[a] = int(std::llround(h[a] / s));
    residual = std::max(residual, std::abs(h[a] - shift[a] * s));
  }
  SampledFunction out = make_zero(g);
  {
    std::ostringstream os;
    os << f.label << " shifted";
    if (residual > 0.0) os << " (lattice residual " << residual << ")";
    out.label = os.str();
  }
  const std::int64_t n = g.total_cells();
  const int N = g.points_per_axis;
  for (std::int64_t i = 0; i < n; ++i) {
    Index idx = g.unflatten(i);
    bool inside = true;
    for (int a = 0; a < g.dim; ++a) {
      idx[a] += shift[a];
      if (idx[a] < 0 || idx[a] >= N) {
        inside = false;
        break;
      }
    }
    out[i] = inside ? f[g.flatten(idx)] : 0.0;
  }
  return out;
}

SampledFunction tail_restrict(const SampledFunction& f, double R) {
  require(R >= 0.0, "tail_restrict: R must be nonnegative");
  SampledFunction out = f;
  const std::int64_t n = f.grid.total_cells();
  const double R2 = R * R;
  for (std::int64_t i = 0; i < n; ++i) {
    const Point x = f.grid.cell_center(i);
    double r2 = 0.0;
    for (int a = 0; a < f.grid.dim; ++a) r2 += x[a] * x[a];
    if (r2 <= R2) out[i] = 0.0;
  }
  return out;
}

std::string CubePolicy::describe() const {
  switch (tag) {
    case Tag::exhaustive_1d:
      return "exhaustive-1d";
    case Tag::dyadic:
      return "dyadic";
    case Tag::stratified: {
      std::ostringstream os;
      os << "stratified(" << max_count << ",seed=" << seed << ")";
      return os.str();
    }
  }
  return "?";
}

CubeFamily cube_family(const UniformGrid& grid, const CubePolicy& policy) {
  CubeFamily fam{grid, policy.describe(), {}};
  const int N = grid.points_per_axis;
  switch (policy.tag) {
    case CubePolicy::Tag::exhaustive_1d: {
      require(grid.dim == 1, "cube_family: exhaustive-1d needs dim == 1");
      fam.cubes.reserve(std::size_t(N) * (N + 1) / 2);
      for (int len = 1; len <= N; ++len)
        for (int a = 0; a + len <= N; ++a) {
          Cube q;
          q.corner[0] = a;
          q.sides[0] = len;
          fam.cubes.push_back(q);
        }
      break;
    }
    case CubePolicy::Tag::dyadic: {
      for (int side = 1; side <= N; side *= 2) {
        const int count = N / side;
        std::vector<int> offs(static_cast<std::size_t>(count));
        for (int j = 0; j < count; ++j) offs[std::size_t(j)] = j * side;
        // all aligned positions per axis, cross product over axes
        std::vector<Index> corners;
        corners.push_back(Index{});
        for (int a = 0; a < grid.dim; ++a) {
          std::vector<Index> next;
          next.reserve(corners.size() * offs.size());
          for (const Index& c : corners)
            for (int o : offs) {
              Index d = c;
              d[a] = o;
              next.push_back(d);
            }
          corners = std::move(next);
        }
        for (const Index& c : corners) {
          Cube q;
          q.corner = c;
          for (int a = 0; a < grid.dim; ++a) q.sides[a] = side;
          fam.cubes.push_back(q);
        }
        if (side > N / 2) break;  // avoid overflow when N is not a power of 2
      }
      break;
    }
    case CubePolicy::Tag::stratified: {
      require(policy.max_count > 0, "cube_family: stratified needs max_count > 0");
      Rng rng(policy.seed);
      const double lmax = std::log2(double(N));
      fam.cubes.reserve(std::size_t(policy.max_count));
      for (std::int64_t k = 0; k < policy.max_count; ++k) {
        const int side =
            std::clamp(int(std::llround(std::exp2(rng.uniform() * lmax))), 1, N);
        Cube q;
        for (int a = 0; a < grid.dim; ++a) {
          q.sides[a] = side;
          q.corner[a] = int(rng.uniform_int(N - side + 1));
        }
        fam.cubes.push_back(q);
      }
      break;
    }
  }
  return fam;
}

CubeFamily product_family(const CubeFamily& fx, const CubeFamily& fy) {
  require(fx.grid.half_width == fy.grid.half_width &&
              fx.grid.points_per_axis == fy.grid.points_per_axis,
          "product_family: factor grids must share (L, N)");
  const int dx = fx.grid.dim, dy = fy.grid.dim;
  CubeFamily fam{make_grid(dx + dy, fx.grid.half_width, fx.grid.points_per_axis),
                 "product(" + fx.policy + "," + fy.policy + ")",
                 {}};
  fam.cubes.reserve(fx.cubes.size() * fy.cubes.size());
  for (const Cube& a : fx.cubes)
    for (const Cube& b : fy.cubes) {
      Cube q;
      for (int i = 0; i < dx; ++i) {
        q.corner[i] = a.corner[i];
        q.sides[i] = a.sides[i];
      }
      for (int i = 0; i < dy; ++i) {
        q.corner[dx + i] = b.corner[i];
        q.sides[dx + i] = b.sides[i];
      }
      fam.cubes.push_back(q);
    }
  return fam;
}

bool covers_grid(const CubeFamily& family) {
  const UniformGrid& g = family.grid;
  std::vector<char> hit(std::size_t(g.total_cells()), 0);
  for (const Cube& q : family.cubes) {
    // iterate cells of q
    Index idx = q.corner;
    while (true) {
      hit[std::size_t(g.flatten(idx))] = 1;
      int a = g.dim - 1;
      while (a >= 0) {
        if (++idx[a] < q.corner[a] + q.sides[a]) break;
        idx[a] = q.corner[a];
        --a;
      }
      if (a < 0) break;
    }
  }
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

void save_function(const SampledFunction& f, std::ostream& os) {
  os << "fklab-grid " << f.grid.dim << " " << format_double(f.grid.half_width)
     << " " << f.grid.points_per_axis << " " << f.label << "\n";
  const std::int64_t n = f.grid.total_cells();
  for (std::int64_t i = 0; i < n; ++i)
    os << i << " " << format_double(f[i]) << "\n";
}

SampledFunction load_function(std::istream& is) {
  std::string magic;
  is >> magic;
  require(magic == "fklab-grid", "load_function: bad header");
  int dim = 0, N = 0;
  double L = 0;
  is >> dim >> L >> N;
  std::string label;
  std::getline(is, label);
  if (!label.empty() && label.front() == ' ') label.erase(label.begin());
  SampledFunction f = make_zero(make_grid(dim, L, N), label);
  const std::int64_t n = f.grid.total_cells();
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t idx = 0;
    double v = 0;
    is >> idx >> v;
    require(bool(is) && idx == i, "load_function: malformed row");
    f[i] = v;
  }
  return f;
}

void save_function_file(const SampledFunction& f, const std::string& path) {
  std::ofstream os(path);
  require(bool(os), "save_function_file: cannot open " + path);
  save_function(f, os);
}

SampledFunction load_function_file(const std::string& path) {
  std::ifstream is(path);
  require(bool(is), "load_function_file: cannot open " + path);
  return load_function(is);
}

}  // namespace fklab
