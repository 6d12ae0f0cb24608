#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fklab {

/// Violated caller contract (bad arguments, unmet preconditions).
struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Violated internal invariant or postcondition.
struct contract_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw precondition_error(msg);
}

inline void ensure(bool cond, const std::string& msg) {
  if (!cond) throw contract_violation(msg);
}

/// Deterministic splittable PRNG (SplitMix64). Used instead of <random>
/// distributions so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::int64_t uniform_int(std::int64_t n) {
    return std::int64_t(next_u64() % std::uint64_t(n));
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Pairwise (cascade) summation: deterministic for fixed input ordering and
/// more accurate than a running sum on long arrays.
inline double pairwise_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n <= 32) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x.subspan(0, h)) + pairwise_sum(x.subspan(h));
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(std::span<const double>(x));
}

/// C-infinity ramp: 0 on (-inf,0], 1 on [1,inf), strictly increasing between.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// Smooth truncation profile for kernels: vanishes on [0,1], equals 1 on
/// [2,inf), C-infinity in between. Argument is |x-y|/eta.
inline double truncation_ramp(double t) { return smooth_step(t - 1.0); }

/// Smooth cutoff: 1 on [0,1], vanishes on [2,inf).
inline double cutoff_ramp(double t) { return 1.0 - smooth_step(t - 1.0); }

/// Shortest exact decimal representation that round-trips a double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer shorter forms when they round-trip, keeps files readable.
  for (int prec = 1; prec < 17; ++prec) {
    char cand[40];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    if (std::strtod(cand, nullptr) == v) return cand;
  }
  return buf;
}

/// pow with exact handling of the common small exponents.
inline double pow_checked(double base, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return base;
  if (e == -1.0) return 1.0 / base;
  if (e == 2.0) return base * base;
  return std::pow(base, e);
}

/// Conjugate exponent p' = p/(p-1).
inline double conjugate_exponent(double p) {
  require(p > 1.0, "conjugate_exponent: p must exceed 1");
  return p / (p - 1.0);
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, "loglog_slope: positive data required");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fklab
