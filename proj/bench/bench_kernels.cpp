// Wall-clock comparison of the OpenMP kernels against their serial reference
// loops: spherical quadrature, and a batch of extremality classifications of
// the kind the demo commands run.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qbary/extremality.hpp"
#include "qbary/random.hpp"
#include "qbary/sphere.hpp"

using namespace qbary;

namespace {

double wall_ms(const std::function<void()>& work, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    work();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

volatile double sink = 0.0;

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

  std::printf("\nspherical quadrature, checker-region smeared effect\n");
  std::printf("%-12s %12s %12s %10s\n", "grid", "serial ms", "parallel ms",
              "speedup");
  const BorelRegion checker = standard_regions().back();
  const NodeIntegrand f = [&checker](const SphereGrid::Node& node) {
    return checker.contains(node.n) ? bloch_projection(node.n)
                                    : Eigen::Matrix2cd::Zero().eval();
  };
  for (const int n : {256, 512, 1024}) {
    const SphereGrid g = SphereGrid::full(n, 2 * n);
    const double ts = wall_ms(
        [&] { sink = sink + integrate_serial(g, f)(0, 0).real(); }, 3);
    const double tp =
        wall_ms([&] { sink = sink + integrate(g, f)(0, 0).real(); }, 3);
    std::printf("%4dx%-7d %12.2f %12.2f %9.2fx\n", n, 2 * n, ts, tp, ts / tp);
  }

  std::printf("\nbatch extremality classification, 96 random qubit devices\n");
  std::vector<Device> batch;
  Rng rng(2024);
  for (int i = 0; i < 32; ++i) {
    batch.push_back(Device{rng.random_povm(2, 4)});
    batch.push_back(Device{rng.random_channel(2, 2, 2)});
    batch.push_back(Device{rng.random_instrument(2, 2, 3)});
  }
  std::vector<int> verdicts(batch.size(), 0);
  const double ts = wall_ms(
      [&] {
        for (std::size_t i = 0; i < batch.size(); ++i)
          verdicts[i] = is_extreme(batch[i]).extreme ? 1 : 0;
      },
      3);
  const double tp = wall_ms(
      [&] {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(batch.size()); ++i)
          verdicts[i] = is_extreme(batch[i]).extreme ? 1 : 0;
      },
      3);
  int extreme_count = 0;
  for (int v : verdicts) extreme_count += v;
  std::printf("%-12s %12.2f %12.2f %9.2fx  (%d extreme)\n", "96 devices", ts,
              tp, ts / tp, extreme_count);
  return 0;
}
