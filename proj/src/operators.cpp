#include "fklab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fklab/fft.hpp"

namespace fklab {

namespace {

double norm2(std::span<const double> z) {
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  return std::sqrt(r2);
}

}  // namespace

KernelSpec hilbert_kernel() {
  KernelSpec k;
  k.label = "hilbert";
  k.dim = 1;
  k.homogeneity = -1.0;
  k.profile = [](std::span<const double> z) { return 1.0 / z[0]; };
  k.ck = certify_kernel(k, 1e-3, 1e3).measured_ck * 1.05;
  return k;
}

KernelSpec riesz_kernel(int axis, int dim) {
  require(axis >= 0 && axis < dim, "riesz_kernel: bad axis");
  KernelSpec k;
  k.label = "riesz" + std::to_string(axis) + "_d" + std::to_string(dim);
  k.dim = dim;
  k.homogeneity = -double(dim);
  k.profile = [axis, dim](std::span<const double> z) {
    const double r = norm2(z);
    return z[std::size_t(axis)] / std::pow(r, double(dim) + 1.0);
  };
  k.ck = certify_kernel(k, 1e-3, 1e3).measured_ck * 1.05;
  return k;
}

KernelSpec truncate_kernel(const KernelSpec& base, double eta) {
  require(eta > 0.0, "truncate_kernel: eta must be positive");
  KernelSpec k;
  k.label = base.label + "@eta=" + format_double(eta);
  k.dim = base.dim;
  k.homogeneity = base.homogeneity;
  auto prof = base.profile;
  k.profile = [prof, eta](std::span<const double> z) {
    const double t = norm2(z) / eta;
    const double ramp = truncation_ramp(t);
    return ramp == 0.0 ? 0.0 : prof(z) * ramp;
  };
  k.ck = certify_kernel(k, eta / 4.0, 1e3).measured_ck * 1.05;
  return k;
}

KernelCertification certify_kernel(const KernelSpec& k, double r_min, double r_max,
                                   int radii, int directions) {
  require(r_min > 0 && r_max > r_min, "certify_kernel: bad radius range");
  KernelCertification cert;
  const double two_pi = 6.283185307179586477;
  for (int ir = 0; ir < radii; ++ir) {
    const double r =
        r_min * std::pow(r_max / r_min, double(ir) / double(radii - 1));
    const int nd = k.dim == 1 ? 2 : directions;
    for (int id = 0; id < nd; ++id) {
      Point z{};
      if (k.dim == 1) {
        z[0] = id == 0 ? r : -r;
      } else {
        const double th = two_pi * (double(id) + 0.37) / double(nd);
        z[0] = r * std::cos(th);
        z[1] = r * std::sin(th);
      }
      std::span<const double> zs(z.data(), std::size_t(k.dim));
      const double kv = std::abs(k.profile(zs));
      cert.measured_size =
          std::max(cert.measured_size, kv * std::pow(r, double(k.dim)));
      const double h = 1e-5 * r;
      for (int a = 0; a < k.dim; ++a) {
        Point zp = z, zm = z;
        zp[std::size_t(a)] += h;
        zm[std::size_t(a)] -= h;
        const double d =
            (k.profile(std::span<const double>(zp.data(), std::size_t(k.dim))) -
             k.profile(std::span<const double>(zm.data(), std::size_t(k.dim)))) /
            (2.0 * h);
        cert.measured_gradient = std::max(
            cert.measured_gradient, std::abs(d) * std::pow(r, double(k.dim) + 1.0));
      }
    }
  }
  cert.measured_ck = std::max(cert.measured_size, cert.measured_gradient);
  cert.within_declared = k.ck <= 0.0 || cert.measured_ck <= k.ck * (1.0 + 1e-9);
  return cert;
}

SymbolSpec cordes_gaussian(double scale, int dim) {
  require(scale > 0.0, "cordes_gaussian: scale must be positive");
  SymbolSpec s;
  s.label = "cordes-gaussian(s=" + format_double(scale) + ")";
  s.dim = dim;
  s.decays = true;
  const double inv2 = 1.0 / (scale * scale);
  auto gauss = [inv2, dim](std::span<const double> p) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += p[std::size_t(a)] * p[std::size_t(a)];
    return std::exp(-r2 * inv2);
  };
  s.sigma = [gauss](std::span<const double> x, std::span<const double> xi) {
    return gauss(x) * gauss(xi);
  };
  s.sep_x = gauss;
  s.sep_xi = gauss;
  // exact per-axis Hermite bounds: |d^n exp(-t^2/s^2)| = |H_n(t/s)| exp(-t^2/s^2) / s^n
  auto hermite_abs = [](int n, double t) {
    switch (n) {
      case 0:
        return 1.0;
      case 1:
        return std::abs(2.0 * t);
      default:
        return std::abs(4.0 * t * t - 2.0);
    }
  };
  s.envelope = [scale, dim, hermite_abs](const Index& alpha, const Index& beta,
                                         std::span<const double> x,
                                         std::span<const double> xi) {
    double bound = 1.0;
    int abs_beta = 0;
    for (int a = 0; a < dim; ++a) {
      bound *= hermite_abs(alpha[a], x[std::size_t(a)] / scale) *
               std::exp(-x[std::size_t(a)] * x[std::size_t(a)] / (scale * scale)) /
               std::pow(scale, double(alpha[a]));
      bound *= hermite_abs(beta[a], xi[std::size_t(a)] / scale) *
               std::exp(-xi[std::size_t(a)] * xi[std::size_t(a)] / (scale * scale)) /
               std::pow(scale, double(beta[a]));
      abs_beta += beta[a];
    }
    double nxi = 0.0;
    for (int a = 0; a < dim; ++a) nxi += xi[std::size_t(a)] * xi[std::size_t(a)];
    return bound * std::pow(1.0 + std::sqrt(nxi), double(abs_beta));
  };
  return s;
}

SymbolSpec unit_symbol(int dim) {
  SymbolSpec s;
  s.label = "unit-symbol";
  s.dim = dim;
  s.decays = false;
  s.sigma = [](std::span<const double>, std::span<const double>) { return 1.0; };
  s.sep_x = [](std::span<const double>) { return 1.0; };
  s.sep_xi = [](std::span<const double>) { return 1.0; };
  s.envelope = [](const Index& alpha, const Index& beta, std::span<const double>,
                  std::span<const double>) {
    for (int v : alpha)
      if (v) return 0.0;
    for (int v : beta)
      if (v) return 0.0;
    return 1.0;
  };
  return s;
}

namespace {

/// Nested central differences for d^alpha_x d^beta_xi sigma.
double fd_derivative(const SymbolSpec& s, Index alpha, Index beta, Point x, Point xi,
                     double h) {
  for (int a = 0; a < s.dim; ++a) {
    if (alpha[a] > 0) {
      --alpha[a];
      Point xp = x, xm = x;
      xp[std::size_t(a)] += h;
      xm[std::size_t(a)] -= h;
      return (fd_derivative(s, alpha, beta, xp, xi, h) -
              fd_derivative(s, alpha, beta, xm, xi, h)) /
             (2.0 * h);
    }
  }
  for (int a = 0; a < s.dim; ++a) {
    if (beta[a] > 0) {
      --beta[a];
      Point xp = xi, xm = xi;
      xp[std::size_t(a)] += h;
      xm[std::size_t(a)] -= h;
      return (fd_derivative(s, alpha, beta, x, xp, h) -
              fd_derivative(s, alpha, beta, x, xm, h)) /
             (2.0 * h);
    }
  }
  return s.sigma(std::span<const double>(x.data(), std::size_t(s.dim)),
                 std::span<const double>(xi.data(), std::size_t(s.dim)));
}

std::vector<Index> multi_indices_up_to(int dim, int order) {
  std::vector<Index> out;
  if (dim == 1) {
    for (int i = 0; i <= order; ++i) out.push_back(Index{i});
  } else {
    for (int i = 0; i <= order; ++i)
      for (int j = 0; i + j <= order; ++j) out.push_back(Index{i, j});
  }
  return out;
}

}  // namespace

SymbolCertification certify_symbol(const SymbolSpec& s, double extent,
                                   int samples_per_axis) {
  SymbolCertification cert;
  cert.ok = true;
  const auto mis = multi_indices_up_to(s.dim, 2);
  const double fd_h = 1e-3;
  std::vector<double> ticks(static_cast<std::size_t>(samples_per_axis));
  for (int i = 0; i < samples_per_axis; ++i)
    ticks[std::size_t(i)] =
        -extent + 2.0 * extent * (double(i) + 0.5) / double(samples_per_axis);

  auto points = [&](auto&& fn) {
    Point p{};
    if (s.dim == 1) {
      for (double a : ticks) {
        p[0] = a;
        fn(p);
      }
    } else {
      for (double a : ticks)
        for (double b : ticks) {
          p[0] = a;
          p[1] = b;
          fn(p);
        }
    }
  };

  points([&](const Point& x) {
    points([&](const Point& xi) {
      double nxi = 0.0;
      for (int a = 0; a < s.dim; ++a) nxi += xi[std::size_t(a)] * xi[std::size_t(a)];
      nxi = std::sqrt(nxi);
      for (const Index& alpha : mis)
        for (const Index& beta : mis) {
          int ab = 0;
          for (int a = 0; a < s.dim; ++a) ab += beta[a];
          const double fd = std::abs(fd_derivative(s, alpha, beta, x, xi, fd_h));
          const double bound =
              s.envelope(alpha, beta,
                         std::span<const double>(x.data(), std::size_t(s.dim)),
                         std::span<const double>(xi.data(), std::size_t(s.dim))) *
              std::pow(1.0 + nxi, -double(ab));
          const double excess = fd / std::max(bound, 1e-12);
          cert.worst_excess = std::max(cert.worst_excess, excess);
          if (fd > 1.1 * bound + 1e-7) cert.ok = false;
        }
    });
  });
  return cert;
}

OperatorSpec OperatorSpec::identity() { return OperatorSpec{}; }

OperatorSpec OperatorSpec::multiply(SampledFunction b) {
  OperatorSpec op;
  op.kind = Kind::multiply;
  op.label = "multiply(" + b.label + ")";
  op.b = std::move(b);
  return op;
}

OperatorSpec OperatorSpec::cz(KernelSpec kernel) {
  OperatorSpec op;
  op.kind = Kind::cz;
  op.label = "cz(" + kernel.label + ")";
  op.kernel = std::move(kernel);
  return op;
}

OperatorSpec OperatorSpec::truncated_cz(KernelSpec base, double eta, double spacing) {
  require(eta >= 2.0 * spacing, "truncated_cz: eta below 2 * spacing is unresolvable");
  OperatorSpec op;
  op.kind = Kind::truncated_cz;
  op.kernel = truncate_kernel(base, eta);
  op.label = "cz(" + op.kernel.label + ")";
  op.eta = eta;
  return op;
}

OperatorSpec OperatorSpec::commutator(SampledFunction b, OperatorSpec inner) {
  require(inner.kind != Kind::commutator, "commutator: nesting depth is limited to 1");
  OperatorSpec op;
  op.kind = Kind::commutator;
  op.label = "[" + inner.label + "," + b.label + "]";
  op.b = std::move(b);
  op.inner = std::make_shared<OperatorSpec>(std::move(inner));
  return op;
}

OperatorSpec OperatorSpec::pseudo(SymbolSpec symbol) {
  OperatorSpec op;
  op.kind = Kind::pseudo;
  op.label = "pseudo(" + symbol.label + ")";
  op.symbol = std::move(symbol);
  return op;
}

namespace {

enum class Mode { fast, direct_parallel, direct_serial };

/// Kernel values on the offset lattice, diagonal zeroed (PV convention).
std::vector<double> kernel_table(const KernelSpec& k, const UniformGrid& g) {
  const int N = g.points_per_axis;
  const int W = 2 * N - 1;
  const double s = g.spacing();
  std::int64_t total = 1;
  for (int a = 0; a < g.dim; ++a) total *= W;
  std::vector<double> table(static_cast<std::size_t>(total));
  for (std::int64_t t = 0; t < total; ++t) {
    Point z{};
    std::int64_t rest = t;
    bool zero = true;
    for (int a = g.dim - 1; a >= 0; --a) {
      const int o = int(rest % W) - (N - 1);
      rest /= W;
      z[std::size_t(a)] = o * s;
      if (o != 0) zero = false;
    }
    table[std::size_t(t)] =
        zero ? 0.0 : k.profile(std::span<const double>(z.data(), std::size_t(g.dim)));
  }
  return table;
}

/// Direct PV quadrature; offsets paired (+o, -o) so that odd-kernel
/// cancellation happens inside each pair.
SampledFunction kernel_apply_direct(const KernelSpec& k, const SampledFunction& f,
                                    bool parallel) {
  const UniformGrid& g = f.grid;
  require(k.dim == g.dim, "kernel apply: dimension mismatch");
  const int N = g.points_per_axis;
  const int W = 2 * N - 1;
  const std::vector<double> table = kernel_table(k, g);
  SampledFunction out = make_zero(g, "T(" + f.label + ")");
  const double sd = std::pow(g.spacing(), g.dim);

  if (g.dim == 1) {
    auto cell = [&](std::int64_t i) {
      double acc = 0.0;
      for (int o = 1; o < N; ++o) {
        double pair = 0.0;
        if (i + o < N) pair += table[std::size_t(N - 1 + o)] * f[i + o];
        if (i - o >= 0) pair += table[std::size_t(N - 1 - o)] * f[i - o];
        acc += pair;
      }
      out[i] = acc * sd;
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < N; ++i) cell(i);
    } else {
      for (std::int64_t i = 0; i < N; ++i) cell(i);
    }
  } else {
    require(g.dim == 2, "kernel apply: dim > 2 not supported");
    auto cell = [&](std::int64_t i) {
      const int i0 = int(i / N), i1 = int(i % N);
      double acc = 0.0;
      // positive-lex offsets: (o0 > 0, any o1) then (o0 == 0, o1 > 0)
      for (int o0 = 0; o0 < N; ++o0) {
        const int lo1 = (o0 == 0) ? 1 : -(N - 1);
        for (int o1 = lo1; o1 < N; ++o1) {
          double pair = 0.0;
          const int p0 = i0 + o0, p1 = i1 + o1;
          if (p0 >= 0 && p0 < N && p1 >= 0 && p1 < N)
            pair += table[std::size_t(N - 1 + o0) * W + std::size_t(N - 1 + o1)] *
                    f[std::int64_t(p0) * N + p1];
          const int m0 = i0 - o0, m1 = i1 - o1;
          if (m0 >= 0 && m0 < N && m1 >= 0 && m1 < N)
            pair += table[std::size_t(N - 1 - o0) * W + std::size_t(N - 1 - o1)] *
                    f[std::int64_t(m0) * N + m1];
          acc += pair;
        }
      }
      out[i] = acc * sd;
    };
    const std::int64_t n = g.total_cells();
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) cell(i);
    } else {
      for (std::int64_t i = 0; i < n; ++i) cell(i);
    }
  }
  return out;
}

/// Zero-padded FFT convolution against the same kernel table.
SampledFunction kernel_apply_fft(const KernelSpec& k, const SampledFunction& f) {
  const UniformGrid& g = f.grid;
  require(k.dim == g.dim, "kernel apply: dimension mismatch");
  const int N = g.points_per_axis;
  const int W = 2 * N - 1;
  const std::size_t M = next_pow2(std::size_t(W));
  const std::vector<double> table = kernel_table(k, g);
  const double sd = std::pow(g.spacing(), g.dim);

  if (g.dim == 1) {
    std::vector<cdouble> fa(M, cdouble(0, 0)), ka(M, cdouble(0, 0));
    for (int i = 0; i < N; ++i) fa[std::size_t(i)] = f[i];
    for (int t = -(N - 1); t <= N - 1; ++t)
      ka[std::size_t((t + std::int64_t(M)) % std::int64_t(M))] =
          table[std::size_t(t + N - 1)];
    fft_pow2(fa, -1);
    fft_pow2(ka, -1);
    for (std::size_t i = 0; i < M; ++i) fa[i] *= ka[i];
    fft_pow2(fa, +1);
    SampledFunction out = make_zero(g, "T(" + f.label + ")");
    for (int i = 0; i < N; ++i) out[i] = fa[std::size_t(i)].real() * sd;
    return out;
  }
  require(g.dim == 2, "kernel apply: dim > 2 not supported");
  auto fft2 = [&](std::vector<cdouble>& a, int sign) {
    std::vector<cdouble> buf(M);
    for (std::size_t r = 0; r < M; ++r) {
      std::copy(a.begin() + std::ptrdiff_t(r * M), a.begin() + std::ptrdiff_t((r + 1) * M),
                buf.begin());
      fft_pow2(buf, sign);
      std::copy(buf.begin(), buf.end(), a.begin() + std::ptrdiff_t(r * M));
    }
    for (std::size_t c = 0; c < M; ++c) {
      for (std::size_t r = 0; r < M; ++r) buf[r] = a[r * M + c];
      fft_pow2(buf, sign);
      for (std::size_t r = 0; r < M; ++r) a[r * M + c] = buf[r];
    }
  };
  std::vector<cdouble> fa(M * M, cdouble(0, 0)), ka(M * M, cdouble(0, 0));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      fa[std::size_t(i) * M + std::size_t(j)] = f[std::int64_t(i) * N + j];
  for (int t0 = -(N - 1); t0 <= N - 1; ++t0)
    for (int t1 = -(N - 1); t1 <= N - 1; ++t1) {
      const std::size_t r = std::size_t((t0 + std::int64_t(M)) % std::int64_t(M));
      const std::size_t c = std::size_t((t1 + std::int64_t(M)) % std::int64_t(M));
      ka[r * M + c] = table[std::size_t(t0 + N - 1) * W + std::size_t(t1 + N - 1)];
    }
  fft2(fa, -1);
  fft2(ka, -1);
  for (std::size_t i = 0; i < M * M; ++i) fa[i] *= ka[i];
  fft2(fa, +1);
  SampledFunction out = make_zero(g, "T(" + f.label + ")");
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      out[std::int64_t(i) * N + j] = fa[std::size_t(i) * M + std::size_t(j)].real() * sd;
  return out;
}

std::vector<cdouble> centered_forward_nd(const UniformGrid& g,
                                         const std::vector<double>& f) {
  const int N = g.points_per_axis;
  const CenteredTransform T(N, g.half_width);
  std::vector<cdouble> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = f[i];
  if (g.dim == 1) return T.forward(a);
  require(g.dim == 2, "pseudo: dim > 2 not supported");
  std::vector<cdouble> row(static_cast<std::size_t>(N));
  for (int r = 0; r < N; ++r) {
    std::copy(a.begin() + std::ptrdiff_t(r) * N, a.begin() + std::ptrdiff_t(r + 1) * N,
              row.begin());
    const auto tr = T.forward(row);
    std::copy(tr.begin(), tr.end(), a.begin() + std::ptrdiff_t(r) * N);
  }
  std::vector<cdouble> col(static_cast<std::size_t>(N));
  for (int c = 0; c < N; ++c) {
    for (int r = 0; r < N; ++r) col[std::size_t(r)] = a[std::size_t(r) * std::size_t(N) + std::size_t(c)];
    const auto tc = T.forward(col);
    for (int r = 0; r < N; ++r) a[std::size_t(r) * std::size_t(N) + std::size_t(c)] = tc[std::size_t(r)];
  }
  return a;
}

std::vector<cdouble> centered_inverse_nd(const UniformGrid& g, std::vector<cdouble> a) {
  const int N = g.points_per_axis;
  const CenteredTransform T(N, g.half_width);
  if (g.dim == 1) return T.inverse(a);
  std::vector<cdouble> row(static_cast<std::size_t>(N));
  for (int r = 0; r < N; ++r) {
    std::copy(a.begin() + std::ptrdiff_t(r) * N, a.begin() + std::ptrdiff_t(r + 1) * N,
              row.begin());
    const auto tr = T.inverse(row);
    std::copy(tr.begin(), tr.end(), a.begin() + std::ptrdiff_t(r) * N);
  }
  std::vector<cdouble> col(static_cast<std::size_t>(N));
  for (int c = 0; c < N; ++c) {
    for (int r = 0; r < N; ++r) col[std::size_t(r)] = a[std::size_t(r) * std::size_t(N) + std::size_t(c)];
    const auto tc = T.inverse(col);
    for (int r = 0; r < N; ++r) a[std::size_t(r) * std::size_t(N) + std::size_t(c)] = tc[std::size_t(r)];
  }
  return a;
}

double dual_freq(const UniformGrid& g, int k) {
  return (k - g.points_per_axis / 2) * (3.141592653589793238462643 / g.half_width);
}

/// T_sigma f(x) = sum_xi sigma(x, xi) fhat(xi) e^{i x xi} dxi^d on the dual
/// lattice xi_k = (k - N/2) pi / L; exact round trip for sigma == 1.
SampledFunction pseudo_apply(const SymbolSpec& sym, const SampledFunction& f, Mode mode) {
  const UniformGrid& g = f.grid;
  require(sym.dim == g.dim, "pseudo: dimension mismatch");
  const int N = g.points_per_axis;
  const double s = g.spacing();
  const double dxi = 3.141592653589793238462643 / g.half_width;
  const double two_pi = 6.283185307179586477;
  const double fwd_scale = std::pow(s / two_pi, g.dim);
  const double inv_scale = std::pow(dxi, g.dim);

  std::vector<cdouble> fhat = centered_forward_nd(g, f.samples);
  for (cdouble& z : fhat) z *= fwd_scale;

  SampledFunction out = make_zero(g, "T_sigma(" + f.label + ")");

  const bool separable = bool(sym.sep_x) && bool(sym.sep_xi);
  if (mode == Mode::fast && separable) {
    // multiplier route: out = sep_x(x) * inverse(sep_xi .* fhat)
    const std::int64_t n = g.total_cells();
    for (std::int64_t k = 0; k < n; ++k) {
      Index ki = g.unflatten(k);
      Point xi{};
      for (int a = 0; a < g.dim; ++a) xi[std::size_t(a)] = dual_freq(g, ki[a]);
      fhat[std::size_t(k)] *=
          sym.sep_xi(std::span<const double>(xi.data(), std::size_t(g.dim)));
    }
    std::vector<cdouble> back = centered_inverse_nd(g, std::move(fhat));
    for (std::int64_t i = 0; i < n; ++i) {
      const Point x = g.cell_center(i);
      out[i] = back[std::size_t(i)].real() * inv_scale *
               sym.sep_x(std::span<const double>(x.data(), std::size_t(g.dim)));
    }
    return out;
  }

  // direct route: O(cells^2) sum with per-axis phase matrices
  std::vector<cdouble> phase(std::size_t(N) * std::size_t(N));
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      phase[std::size_t(i) * std::size_t(N) + std::size_t(k)] =
          std::polar(1.0, g.coord(i) * dual_freq(g, k));

  const std::int64_t n = g.total_cells();
  auto cell = [&](std::int64_t i) {
    const Point x = g.cell_center(i);
    const Index ii = g.unflatten(i);
    cdouble acc(0, 0);
    if (g.dim == 1) {
      for (int k = 0; k < N; ++k) {
        Point xi{};
        xi[0] = dual_freq(g, k);
        acc += sym.sigma(std::span<const double>(x.data(), 1),
                         std::span<const double>(xi.data(), 1)) *
               fhat[std::size_t(k)] * phase[std::size_t(ii[0]) * std::size_t(N) + std::size_t(k)];
      }
    } else {
      for (int k0 = 0; k0 < N; ++k0) {
        const cdouble ph0 = phase[std::size_t(ii[0]) * std::size_t(N) + std::size_t(k0)];
        for (int k1 = 0; k1 < N; ++k1) {
          Point xi{};
          xi[0] = dual_freq(g, k0);
          xi[1] = dual_freq(g, k1);
          acc += sym.sigma(std::span<const double>(x.data(), 2),
                           std::span<const double>(xi.data(), 2)) *
                 fhat[std::size_t(k0) * std::size_t(N) + std::size_t(k1)] * ph0 *
                 phase[std::size_t(ii[1]) * std::size_t(N) + std::size_t(k1)];
        }
      }
    }
    out[i] = acc.real() * inv_scale;
  };
  if (mode == Mode::direct_serial) {
    for (std::int64_t i = 0; i < n; ++i) cell(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) cell(i);
  }
  return out;
}

SampledFunction apply_impl(const OperatorSpec& op, const SampledFunction& f, Mode mode) {
  switch (op.kind) {
    case OperatorSpec::Kind::identity: {
      SampledFunction out = f;
      return out;
    }
    case OperatorSpec::Kind::multiply: {
      require(op.b.grid == f.grid, "multiply: grid mismatch");
      SampledFunction out = f;
      out.label = op.label + "(" + f.label + ")";
      for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] *= op.b.samples[i];
      return out;
    }
    case OperatorSpec::Kind::cz:
    case OperatorSpec::Kind::truncated_cz: {
      if (op.kind == OperatorSpec::Kind::truncated_cz)
        require(op.eta >= 2.0 * f.grid.spacing(),
                "truncated_cz: eta below 2 * spacing is unresolvable");
      if (mode == Mode::fast) return kernel_apply_fft(op.kernel, f);
      return kernel_apply_direct(op.kernel, f, mode == Mode::direct_parallel);
    }
    case OperatorSpec::Kind::commutator: {
      require(op.b.grid == f.grid, "commutator: grid mismatch");
      SampledFunction bf = f;
      for (std::size_t i = 0; i < bf.samples.size(); ++i)
        bf.samples[i] *= op.b.samples[i];
      SampledFunction t_bf = apply_impl(*op.inner, bf, mode);
      const SampledFunction t_f = apply_impl(*op.inner, f, mode);
      for (std::size_t i = 0; i < t_bf.samples.size(); ++i)
        t_bf.samples[i] -= op.b.samples[i] * t_f.samples[i];
      t_bf.label = op.label + "(" + f.label + ")";
      return t_bf;
    }
    case OperatorSpec::Kind::pseudo:
      return pseudo_apply(op.symbol, f, mode);
  }
  throw contract_violation("apply: unknown operator kind");
}

}  // namespace

SampledFunction apply(const OperatorSpec& op, const SampledFunction& f) {
  return apply_impl(op, f, Mode::fast);
}

SampledFunction apply_direct(const OperatorSpec& op, const SampledFunction& f) {
  return apply_impl(op, f, Mode::direct_parallel);
}

namespace reference {
SampledFunction apply(const OperatorSpec& op, const SampledFunction& f) {
  return apply_impl(op, f, Mode::direct_serial);
}
}  // namespace reference

double bmo_norm(const SampledFunction& b, const CubeFamily& cubes) {
  require(b.grid == cubes.grid, "bmo_norm: grid mismatch");
  const BoxSums sums(b);
  const UniformGrid& g = b.grid;
  const std::int64_t m = std::int64_t(cubes.cubes.size());
  double best = 0.0;
#pragma omp parallel
  {
    double local = 0.0;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < m; ++i) {
      const Cube& q = cubes.cubes[std::size_t(i)];
      const double mean = sums.average(q);
      double osc = 0.0;
      Index idx = q.corner;
      while (true) {
        osc += std::abs(b[g.flatten(idx)] - mean);
        int a = g.dim - 1;
        while (a >= 0) {
          if (++idx[a] < q.corner[a] + q.sides[a]) break;
          idx[a] = q.corner[a];
          --a;
        }
        if (a < 0) break;
      }
      local = std::max(local, osc / double(q.cell_count(g.dim)));
    }
#pragma omp critical(fklab_bmo)
    best = std::max(best, local);
  }
  return best;
}

SampledFunction cmo_approximant(const SampledFunction& b, int j) {
  const UniformGrid& g = b.grid;
  const double sigma = std::exp2(double(-j));
  const double radius = std::exp2(double(j));
  const double s = g.spacing();
  const int window = std::max(1, int(std::ceil(4.0 * sigma / s)));

  SampledFunction out = make_zero(g, b.label + "~j" + std::to_string(j));
  const int N = g.points_per_axis;
  // separable Gaussian taps, normalized to unit mass
  std::vector<double> taps(static_cast<std::size_t>(2 * window + 1));
  double mass = 0.0;
  for (int t = -window; t <= window; ++t) {
    taps[std::size_t(t + window)] = std::exp(-0.5 * (t * s) * (t * s) / (sigma * sigma));
    mass += taps[std::size_t(t + window)];
  }
  for (double& v : taps) v /= mass;

  auto convolve_axis = [&](const std::vector<double>& in, int axis) {
    std::vector<double> res(in.size(), 0.0);
    const std::int64_t n = g.total_cells();
    for (std::int64_t i = 0; i < n; ++i) {
      Index idx = g.unflatten(i);
      double acc = 0.0;
      for (int t = -window; t <= window; ++t) {
        const int p = idx[axis] + t;
        if (p < 0 || p >= N) continue;
        Index src = idx;
        src[axis] = p;
        acc += taps[std::size_t(t + window)] * in[std::size_t(g.flatten(src))];
      }
      res[std::size_t(i)] = acc;
    }
    return res;
  };

  std::vector<double> work = b.samples;
  for (int a = 0; a < g.dim; ++a) work = convolve_axis(work, a);
  const std::int64_t n = g.total_cells();
  for (std::int64_t i = 0; i < n; ++i) {
    const Point x = g.cell_center(i);
    double r = 0.0;
    for (int a = 0; a < g.dim; ++a) r += x[std::size_t(a)] * x[std::size_t(a)];
    out[i] = work[std::size_t(i)] * cutoff_ramp(std::sqrt(r) / radius);
  }
  return out;
}

std::vector<std::pair<int, double>> cmo_distance(const SampledFunction& b,
                                                 const std::vector<int>& scales,
                                                 const CubeFamily& cubes) {
  std::vector<std::pair<int, double>> curve;
  curve.reserve(scales.size());
  for (int j : scales) {
    SampledFunction diff = b;
    const SampledFunction bj = cmo_approximant(b, j);
    for (std::size_t i = 0; i < diff.samples.size(); ++i)
      diff.samples[i] -= bj.samples[i];
    curve.emplace_back(j, bmo_norm(diff, cubes));
  }
  return curve;
}

CzoNorm czo_norm_estimate(const OperatorSpec& op,
                          const std::vector<SampledFunction>& probes) {
  require(!probes.empty(), "czo_norm_estimate: empty probe set");
  CzoNorm rep;
  const WeightSpec unit = WeightSpec::constant(1.0, probes.front().grid.dim);
  const SampledFunction ws = eval_weight(unit, probes.front().grid);
  for (const SampledFunction& f : probes) {
    const double nf = weighted_norm(f, 2.0, ws);
    require(nf > 0.0, "czo_norm_estimate: zero probe");
    rep.l2_envelope =
        std::max(rep.l2_envelope, weighted_norm(apply(op, f), 2.0, ws) / nf);
  }
  switch (op.kind) {
    case OperatorSpec::Kind::identity:
    case OperatorSpec::Kind::multiply:
      rep.ck = 0.0;
      break;
    case OperatorSpec::Kind::cz:
    case OperatorSpec::Kind::truncated_cz:
      require(op.kernel.ck > 0.0, "czo_norm_estimate: kernel lacks certification");
      rep.ck = op.kernel.ck;
      break;
    case OperatorSpec::Kind::commutator:
      require(op.inner != nullptr, "czo_norm_estimate: dangling commutator");
      rep.ck = czo_norm_estimate(*op.inner, probes).ck;
      break;
    case OperatorSpec::Kind::pseudo: {
      // kernel-free bound: sampled sup of |sigma|
      double sup = 0.0;
      const UniformGrid& g = probes.front().grid;
      for (int i = 0; i < 17; ++i)
        for (int k = 0; k < 17; ++k) {
          Point x{}, xi{};
          x[0] = -g.half_width + 2.0 * g.half_width * i / 16.0;
          xi[0] = dual_freq(g, (k * (g.points_per_axis - 1)) / 16);
          if (g.dim == 2) {
            x[1] = x[0];
            xi[1] = xi[0];
          }
          sup = std::max(sup, std::abs(op.symbol.sigma(
                                  std::span<const double>(x.data(), std::size_t(g.dim)),
                                  std::span<const double>(xi.data(), std::size_t(g.dim)))));
        }
      rep.ck = sup;
      break;
    }
  }
  rep.total = rep.l2_envelope + rep.ck;
  return rep;
}

TruncationFit truncation_error_check(const KernelSpec& kernel, const SampledFunction& b,
                                     const std::vector<SampledFunction>& probes,
                                     const std::vector<double>& etas,
                                     const MaximalParams& maximal) {
  require(!probes.empty() && !etas.empty(), "truncation_error_check: empty inputs");
  const UniformGrid& g = b.grid;
  const double s = g.spacing();

  // finite-difference sup of |grad b|
  double grad_b = 0.0;
  const std::int64_t n = g.total_cells();
  const int N = g.points_per_axis;
  for (std::int64_t i = 0; i < n; ++i) {
    Index idx = g.unflatten(i);
    double g2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      Index up = idx, dn = idx;
      up[a] = std::min(N - 1, idx[a] + 1);
      dn[a] = std::max(0, idx[a] - 1);
      const double d = (b[g.flatten(up)] - b[g.flatten(dn)]) / (s * (up[a] - dn[a]));
      g2 += d * d;
    }
    grad_b = std::max(grad_b, std::sqrt(g2));
  }
  require(grad_b > 0.0 || b.samples.empty() ||
              *std::max_element(b.samples.begin(), b.samples.end()) ==
                  *std::min_element(b.samples.begin(), b.samples.end()),
          "truncation_error_check: inconsistent gradient");

  TruncationFit fit;
  const OperatorSpec full = OperatorSpec::commutator(b, OperatorSpec::cz(kernel));
  for (double eta : etas) {
    const OperatorSpec trunc =
        OperatorSpec::commutator(b, OperatorSpec::truncated_cz(kernel, eta, s));
    double worst = 0.0;
    for (const SampledFunction& f : probes) {
      const SampledFunction full_f = apply(full, f);
      const SampledFunction trunc_f = apply(trunc, f);
      const SampledFunction mf = hl_maximal(f, maximal);
      for (std::int64_t i = 0; i < n; ++i) {
        const double num = std::abs(full_f[i] - trunc_f[i]);
        const double den = eta * grad_b * mf[i];
        if (den == 0.0) {
          if (num > 1e-12) fit.inconsistent = true;
          continue;
        }
        worst = std::max(worst, num / den);
      }
    }
    fit.etas.push_back(eta);
    fit.fitted.push_back(grad_b == 0.0 ? 0.0 : worst);
  }
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (double v : fit.fitted) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  fit.stable = (mx == 0.0) || (mx <= 2.0 * mn);
  return fit;
}

CommutatorBoundFit commutator_weighted_bound_check(
    const SampledFunction& b, const OperatorSpec& inner, const WeightSpec& w,
    const std::vector<SampledFunction>& probes, const MaximalParams& maximal,
    const CubeFamily& bmo_cubes) {
  require(!probes.empty(), "commutator_weighted_bound_check: empty probes");
  CommutatorBoundFit fit;
  fit.bmo = bmo_norm(b, bmo_cubes);
  if (fit.bmo <= 1e-14) {
    fit.degenerate = true;
    return fit;
  }
  const OperatorSpec cb = OperatorSpec::commutator(b, inner);
  const SampledFunction ws = eval_weight(w, b.grid);
  for (const SampledFunction& f : probes) {
    const SampledFunction cbf = apply(cb, f);
    const SampledFunction m2f = hl_maximal(hl_maximal(f, maximal), maximal);
    const double den = fit.bmo * weighted_norm(m2f, 2.0, ws);
    require(den > 0.0, "commutator_weighted_bound_check: vanishing M^2 f");
    fit.fitted = std::max(fit.fitted, weighted_norm(cbf, 2.0, ws) / den);
  }
  return fit;
}

}  // namespace fklab
