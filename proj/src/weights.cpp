#include "fklab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace fklab {

double WeightSpec::eval(std::span<const double> x) const {
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::power: {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double d = x[std::size_t(a)] - center[std::size_t(a)];
        r2 += d * d;
      }
      return std::pow(r2, 0.5 * alpha);
    }
    case Kind::clipped_power: {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double d = x[std::size_t(a)] - center[std::size_t(a)];
        r2 += d * d;
      }
      return std::pow(std::max(1.0, std::sqrt(r2)), alpha);
    }
    case Kind::product: {
      const int du = u->dim;
      return u->eval(x.subspan(0, std::size_t(du))) *
             v->eval(x.subspan(std::size_t(du)));
    }
    case Kind::sampled:
    case Kind::rdf_generated:
      throw precondition_error("WeightSpec::eval: sampled weights have no analytic form");
  }
  return 1.0;
}

WeightSpec WeightSpec::constant(double value, int dim) {
  require(value > 0.0 && std::isfinite(value), "weight constant must be positive");
  WeightSpec w;
  w.kind = Kind::constant;
  w.dim = dim;
  w.c = value;
  std::ostringstream os;
  os << "const(" << value << ")";
  w.label = os.str();
  return w;
}

WeightSpec WeightSpec::power(double alpha, int dim, Point center) {
  WeightSpec w;
  w.kind = Kind::power;
  w.dim = dim;
  w.alpha = alpha;
  w.center = center;
  std::ostringstream os;
  os << "|x-c|^" << alpha;
  w.label = os.str();
  return w;
}

WeightSpec WeightSpec::clipped_power(double alpha, int dim, Point center) {
  WeightSpec w;
  w.kind = Kind::clipped_power;
  w.dim = dim;
  w.alpha = alpha;
  w.center = center;
  std::ostringstream os;
  os << "max(1,|x-c|)^" << alpha;
  w.label = os.str();
  return w;
}

WeightSpec WeightSpec::product(WeightSpec un, WeightSpec vm) {
  WeightSpec w;
  w.kind = Kind::product;
  w.dim = un.dim + vm.dim;
  w.label = un.label + " (x) " + vm.label;
  w.u = std::make_shared<WeightSpec>(std::move(un));
  w.v = std::make_shared<WeightSpec>(std::move(vm));
  return w;
}

WeightSpec WeightSpec::sampled(SampledFunction samples, std::string label) {
  WeightSpec w;
  w.kind = Kind::sampled;
  w.dim = samples.grid.dim;
  w.label = label.empty() ? "sampled(" + samples.label + ")" : std::move(label);
  w.table = std::make_shared<SampledFunction>(std::move(samples));
  return w;
}

WeightSpec WeightSpec::rdf_generated(SampledFunction samples, std::string label) {
  WeightSpec w = sampled(std::move(samples), std::move(label));
  w.kind = Kind::rdf_generated;
  return w;
}

SampledFunction eval_weight(const WeightSpec& w, const UniformGrid& grid) {
  require(w.dim == grid.dim, "eval_weight: dimension mismatch");
  SampledFunction out = make_zero(grid, w.label);
  const std::int64_t n = grid.total_cells();
  if (w.kind == WeightSpec::Kind::sampled || w.kind == WeightSpec::Kind::rdf_generated) {
    require(w.table && w.table->grid == grid,
            "eval_weight: sampled weight grid mismatch");
    out.samples = w.table->samples;
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      const Point x = grid.cell_center(i);
      out[i] = w.eval(std::span<const double>(x.data(), std::size_t(grid.dim)));
    }
  }
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(out[i] > 0.0) || !std::isfinite(out[i])) {
      std::ostringstream os;
      os << "eval_weight: weight '" << w.label << "' not strictly positive/finite at cell "
         << i << " (value " << out[i] << ")";
      throw precondition_error(os.str());
    }
  }
  return out;
}

BoxSums::BoxSums(const SampledFunction& f)
    : dim_(f.grid.dim), n_(f.grid.points_per_axis) {
  require(dim_ == 1 || dim_ == 2, "BoxSums: only dim 1 and 2 supported");
  if (dim_ == 1) {
    table_.assign(std::size_t(n_) + 1, 0.0);
    for (int i = 0; i < n_; ++i)
      table_[std::size_t(i) + 1] = table_[std::size_t(i)] + f[i];
  } else {
    const std::size_t stride = std::size_t(n_) + 1;
    table_.assign(stride * stride, 0.0);
    for (int i = 0; i < n_; ++i) {
      double row = 0.0;
      for (int j = 0; j < n_; ++j) {
        row += f[std::int64_t(i) * n_ + j];
        table_[(std::size_t(i) + 1) * stride + std::size_t(j) + 1] =
            table_[std::size_t(i) * stride + std::size_t(j) + 1] + row;
      }
    }
  }
}

double BoxSums::sum(const Cube& q) const {
  if (dim_ == 1) {
    return table_[std::size_t(q.corner[0] + q.sides[0])] - table_[std::size_t(q.corner[0])];
  }
  const std::size_t stride = std::size_t(n_) + 1;
  const std::size_t i0 = std::size_t(q.corner[0]), i1 = i0 + std::size_t(q.sides[0]);
  const std::size_t j0 = std::size_t(q.corner[1]), j1 = j0 + std::size_t(q.sides[1]);
  return table_[i1 * stride + j1] - table_[i0 * stride + j1] -
         table_[i1 * stride + j0] + table_[i0 * stride + j0];
}

namespace {

/// Samples of w^e with exact handling of e in {-1, 0, 1}.
SampledFunction power_samples(const SampledFunction& w, double e) {
  SampledFunction out = w;
  if (e == 1.0) return out;
  const std::int64_t n = w.grid.total_cells();
  for (std::int64_t i = 0; i < n; ++i) out[i] = pow_checked(w[i], e);
  return out;
}

struct ArgMax {
  double value = -1.0;
  std::size_t index = 0;
};

/// Deterministic max with first-occurrence tie-break, independent of the
/// scan order used by worker threads.
void merge_argmax(ArgMax& into, const ArgMax& other) {
  if (other.value > into.value ||
      (other.value == into.value && other.index < into.index))
    into = other;
}

template <typename PerCube>
ArgMax scan_family(const CubeFamily& fam, PerCube&& value_of) {
  const std::int64_t m = std::int64_t(fam.cubes.size());
  ArgMax best;
#pragma omp parallel
  {
    ArgMax local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < m; ++i) {
      const double v = value_of(fam.cubes[std::size_t(i)]);
      merge_argmax(local, ArgMax{v, std::size_t(i)});
    }
#pragma omp critical(fklab_scan_family)
    merge_argmax(best, local);
  }
  return best;
}

}  // namespace

ApReport ap_constant(const WeightSpec& w, double p, const CubeFamily& cubes) {
  require(p > 1.0 && std::isfinite(p), "ap_constant: need 1 < p < inf (use ainf_constant)");
  require(!cubes.cubes.empty(), "ap_constant: empty cube family");
  const SampledFunction ws = eval_weight(w, cubes.grid);
  const double dual_e = 1.0 - conjugate_exponent(p);  // = -1/(p-1)
  const SampledFunction sigma = power_samples(ws, dual_e);
  const BoxSums W(ws), S(sigma);

  const ArgMax best = scan_family(cubes, [&](const Cube& q) {
    return W.average(q) * pow_checked(S.average(q), p - 1.0);
  });
  // dual functional: avg sigma * (avg sigma^{1-p})^{p'-1} and sigma^{1-p} = w
  const double pp = conjugate_exponent(p);
  const ArgMax dual = scan_family(cubes, [&](const Cube& q) {
    return S.average(q) * pow_checked(W.average(q), pp - 1.0);
  });

  ApReport rep;
  rep.p = p;
  rep.constant = best.value;
  rep.argmax_cube = cubes.cubes[best.index];
  rep.argmax_index = best.index;
  rep.family = cubes.policy;
  rep.family_size = cubes.size();
  rep.dual_constant = dual.value;
  ensure(rep.constant >= 1.0 - 1e-9, "ap_constant: estimate below 1");
  return rep;
}

double a1_constant(const WeightSpec& w, const CubeFamily& cubes) {
  require(!cubes.cubes.empty(), "a1_constant: empty cube family");
  const SampledFunction ws = eval_weight(w, cubes.grid);
  const BoxSums W(ws);
  const UniformGrid& g = cubes.grid;
  const ArgMax best = scan_family(cubes, [&](const Cube& q) {
    double mn = std::numeric_limits<double>::infinity();
    Index idx = q.corner;
    while (true) {
      mn = std::min(mn, ws[g.flatten(idx)]);
      int a = g.dim - 1;
      while (a >= 0) {
        if (++idx[a] < q.corner[a] + q.sides[a]) break;
        idx[a] = q.corner[a];
        --a;
      }
      if (a < 0) break;
    }
    return W.average(q) / mn;
  });
  return best.value;
}

double ainf_constant(const WeightSpec& w, const CubeFamily& cubes) {
  require(!cubes.cubes.empty(), "ainf_constant: empty cube family");
  const SampledFunction ws = eval_weight(w, cubes.grid);
  const BoxSums W(ws);
  const UniformGrid& g = cubes.grid;
  const int dim = g.dim;

  const ArgMax best = scan_family(cubes, [&](const Cube& q) {
    // M(w chi_Q) restricted to the cells of Q: for each family cube Q'
    // meeting Q, the candidate value W(Q' cap Q)/|Q'| covers Q' cap Q.
    const std::int64_t nq = q.cell_count(dim);
    std::vector<double> m(std::size_t(nq), 0.0);
    for (const Cube& qp : cubes.cubes) {
      Cube inter;
      bool empty = false;
      for (int a = 0; a < dim; ++a) {
        const int lo = std::max(q.corner[a], qp.corner[a]);
        const int hi = std::min(q.corner[a] + q.sides[a], qp.corner[a] + qp.sides[a]);
        if (lo >= hi) {
          empty = true;
          break;
        }
        inter.corner[a] = lo;
        inter.sides[a] = hi - lo;
      }
      if (empty) continue;
      const double cand = W.sum(inter) / double(qp.cell_count(dim));
      // update cells of inter within q's local buffer
      Index idx = inter.corner;
      while (true) {
        std::int64_t local = 0;
        for (int a = 0; a < dim; ++a)
          local = local * q.sides[a] + (idx[a] - q.corner[a]);
        m[std::size_t(local)] = std::max(m[std::size_t(local)], cand);
        int a = dim - 1;
        while (a >= 0) {
          if (++idx[a] < inter.corner[a] + inter.sides[a]) break;
          idx[a] = inter.corner[a];
          --a;
        }
        if (a < 0) break;
      }
    }
    for (double v : m)
      ensure(v > 0.0, "ainf_constant: family does not cover a cell of some cube");
    return pairwise_sum(m) / W.sum(q);
  });
  return best.value;
}

OpennessReport openness_check(const WeightSpec& w, double p, const CubeFamily& cubes) {
  require(p > 1.0 && std::isfinite(p), "openness_check: need 1 < p < inf");
  const int d = cubes.grid.dim;
  const double cd = std::exp2(double(d + 1));
  const ApReport base = ap_constant(w, p, cubes);

  double eps = 0.0;
  if (p == 2.0) {
    eps = 1.0 / (cd * base.constant);
  } else {
    const SampledFunction ws = eval_weight(w, cubes.grid);
    const SampledFunction sig = power_samples(ws, 1.0 - conjugate_exponent(p));
    const double sig_ainf =
        ainf_constant(WeightSpec::sampled(sig, "sigma(" + w.label + ")"), cubes);
    eps = (p - 1.0) / (cd * sig_ainf);
  }
  require(eps < p - 1.0, "openness_check: epsilon >= p - 1");

  const ApReport open = ap_constant(w, p - eps, cubes);
  OpennessReport rep;
  rep.p = p;
  rep.epsilon = eps;
  rep.base_constant = base.constant;
  rep.p_minus_eps_constant = open.constant;
  rep.ratio_vs_bound = open.constant / (std::exp2(p - 1.0) * base.constant);
  return rep;
}

ReverseHolderReport reverse_holder_check(const WeightSpec& w, const CubeFamily& cubes,
                                         std::optional<double> ainf) {
  const double a = ainf ? *ainf : ainf_constant(w, cubes);
  const int d = cubes.grid.dim;
  const double r = 1.0 + 1.0 / (std::exp2(double(d + 1)) * a - 1.0);
  const SampledFunction ws = eval_weight(w, cubes.grid);
  const SampledFunction wr = power_samples(ws, r);
  const BoxSums W(ws), Wr(wr);
  const ArgMax best = scan_family(cubes, [&](const Cube& q) {
    return std::pow(Wr.average(q), 1.0 / r) / W.average(q);
  });
  ReverseHolderReport rep;
  rep.ainf = a;
  rep.r_w = r;
  rep.worst_ratio = best.value;
  rep.argmax_index = best.index;
  return rep;
}

ElementarySlacks elementary_ap_checks(const WeightSpec& w, double p,
                                      const SampledFunction& g, const Cube& Q,
                                      const std::vector<std::int64_t>& E_cells,
                                      const CubeFamily& cubes) {
  require(!E_cells.empty(), "elementary_ap_checks: E must be nonempty");
  const UniformGrid& grid = cubes.grid;
  require(g.grid == grid, "elementary_ap_checks: g grid mismatch");
  const std::int64_t nq = Q.cell_count(grid.dim);
  for (std::int64_t cell : E_cells) {
    require(Q.contains(grid.unflatten(cell), grid.dim),
            "elementary_ap_checks: E not contained in Q");
  }
  const SampledFunction ws = eval_weight(w, grid);
  const double dual_e = 1.0 - conjugate_exponent(p);
  const SampledFunction sigma = power_samples(ws, dual_e);
  const BoxSums W(ws), S(sigma);

  // constant over the family, and at least the value on Q itself
  const double val_Q = W.average(Q) * pow_checked(S.average(Q), p - 1.0);
  const double apc = std::max(ap_constant(w, p, cubes).constant, val_Q);

  const double sd = std::pow(grid.spacing(), grid.dim);

  // gather g, g^p w and w over Q
  std::vector<double> gq, gpw;
  gq.reserve(std::size_t(nq));
  gpw.reserve(std::size_t(nq));
  Index idx = Q.corner;
  while (true) {
    const std::int64_t f = grid.flatten(idx);
    require(g[f] >= 0.0, "elementary_ap_checks: g must be nonnegative");
    gq.push_back(g[f]);
    gpw.push_back(std::pow(g[f], p) * ws[f]);
    int a = grid.dim - 1;
    while (a >= 0) {
      if (++idx[a] < Q.corner[a] + Q.sides[a]) break;
      idx[a] = Q.corner[a];
      --a;
    }
    if (a < 0) break;
  }
  const double avg_g = pairwise_sum(gq) / double(nq);
  const double wQ = W.sum(Q) * sd;
  const double rhs1 =
      std::pow(apc, 1.0 / p) * std::pow(pairwise_sum(gpw) * sd / wQ, 1.0 / p);

  double wE = 0.0;
  for (std::int64_t cell : E_cells) wE += ws[cell];
  wE *= sd;
  const double rhs2 = apc * std::pow(double(nq) / double(E_cells.size()), p) * wE;

  return ElementarySlacks{rhs1 - avg_g, rhs2 - wQ};
}

ProductCheck product_constant_check(const WeightSpec& u, const WeightSpec& v, double q,
                                    const CubeFamily& fam_u, const CubeFamily& fam_v) {
  require(u.dim == fam_u.grid.dim && v.dim == fam_v.grid.dim,
          "product_constant_check: dimension mismatch");
  const CubeFamily fam = product_family(fam_u, fam_v);
  const WeightSpec w = WeightSpec::product(u, v);
  ProductCheck out;
  out.product_constant = ap_constant(w, q, fam).constant;
  out.factor_u = ap_constant(u, q, fam_u).constant;
  out.factor_v = ap_constant(v, q, fam_v).constant;
  out.slack = out.factor_u * out.factor_v - out.product_constant;
  return out;
}

void save_catalog(const std::vector<CatalogEntry>& entries, const std::string& path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const CatalogEntry& e : entries) {
    nlohmann::ordered_json item;
    item["label"] = e.weight.label;
    item["dim"] = e.weight.dim;
    item["p"] = e.p;
    item["constant"] = e.constant;
    item["family"] = e.family;
    doc.push_back(item);
  }
  std::ofstream os(path);
  require(bool(os), "save_catalog: cannot open " + path);
  os << doc.dump(2) << "\n";
}

}  // namespace fklab
