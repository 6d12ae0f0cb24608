// Timing comparison of the parallel kernels against their serial references
// and the fast transform paths. Usage: fklab_bench [N_1d] [N_2d]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "fklab/compactness.hpp"
#include "fklab/maximal.hpp"
#include "fklab/operators.hpp"

using namespace fklab;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename F>
double time_ms(F&& fn, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int n1 = argc > 1 ? std::atoi(argv[1]) : 2048;
  const int n2 = argc > 2 ? std::atoi(argv[2]) : 64;

  std::printf("%-34s %12s\n", "kernel", "best ms");

  {
    const UniformGrid g = make_grid(1, 8.0, n1);
    const SampledFunction f = sample(
        [](std::span<const double> x) { return std::exp(-x[0] * x[0]); }, g);
    const MaximalParams exh = make_maximal_params(cube_family(g, Exhaustive1d{}));
    std::printf("%-34s %12.3f\n", "maximal 1d scan (hull)",
                time_ms([&] { hl_maximal(f, exh); }));
    if (n1 <= 1024)
      std::printf("%-34s %12.3f\n", "maximal 1d brute reference",
                  time_ms([&] { reference::hl_maximal(f, exh); }, 1));
    const MaximalParams dy = make_maximal_params(cube_family(g, Dyadic{}));
    std::printf("%-34s %12.3f\n", "maximal 1d dyadic (omp)",
                time_ms([&] { hl_maximal(f, dy); }));
  }

  {
    const UniformGrid g = make_grid(2, 8.0, n2);
    const SampledFunction f = sample(
        [](std::span<const double> x) {
          return std::exp(-(x[0] * x[0] + x[1] * x[1]));
        },
        g);
    const OperatorSpec op =
        OperatorSpec::truncated_cz(riesz_kernel(0, 2), 8.0 * g.spacing(), g.spacing());
    std::printf("%-34s %12.3f\n", "cz 2d direct (omp)",
                time_ms([&] { apply_direct(op, f); }));
    std::printf("%-34s %12.3f\n", "cz 2d direct serial reference",
                time_ms([&] { reference::apply(op, f); }, 1));
    std::printf("%-34s %12.3f\n", "cz 2d fft", time_ms([&] { apply(op, f); }));

    const OperatorSpec ps = OperatorSpec::pseudo(cordes_gaussian(1.0, 2));
    std::printf("%-34s %12.3f\n", "pseudo 2d direct (omp)",
                time_ms([&] { apply_direct(ps, f); }, 1));
    std::printf("%-34s %12.3f\n", "pseudo 2d multiplier path",
                time_ms([&] { apply(ps, f); }));
  }
  return 0;
}
