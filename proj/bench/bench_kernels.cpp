// Times the serial and OpenMP versions of each kernel on the same input and
// checks that they agree.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "hmass/kernels.hpp"

using namespace hmass;
using namespace hmass::kernels;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = INFINITY;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double ts, double tp, bool agree) {
  std::printf("%-18s serial %9.4f s  parallel %9.4f s  speedup %5.2f  %s\n", name, ts, tp, ts / tp,
              agree ? "agree" : "DISAGREE");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  {
    std::vector<double> psi(8193);
    psi[0] = 0.0;
    for (std::size_t k = 1; k < psi.size(); ++k) psi[k] = std::pow(k / 4096.0, 1.3) + 0.1 * u(rng);
    std::vector<double> a, b;
    const double ts = best_of(3, [&] { a = subadditive_closure_serial(psi); });
    const double tp = best_of(3, [&] { b = subadditive_closure_parallel(psi); });
    report("closure", ts, tp, a == b);
  }
  {
    std::vector<Segment> segs;
    for (int i = 0; i < 3000; ++i) segs.push_back({Point{u(rng), u(rng)}, Point{u(rng), u(rng)}});
    std::vector<std::vector<double>> a, b;
    const double ts = best_of(3, [&] { a = split_parameters_serial(segs, 1e-9); });
    const double tp = best_of(3, [&] { b = split_parameters_parallel(segs, 1e-9); });
    report("split_parameters", ts, tp, a == b);
  }
  {
    ForestProblem p;
    p.nodes = 7;
    for (std::size_t i = 0; i < p.nodes; ++i)
      for (std::size_t j = i + 1; j < p.nodes; ++j)
        if (p.edges.size() < 18) {
          p.edges.push_back({i, j});
          p.lengths.push_back(0.1 + u(rng));
        }
    p.supply = {2, 1, 0, 0, -1, -1, -1};
    auto h = [](double m) { return std::sqrt(m); };
    ForestOptimum a, b;
    const double ts = best_of(2, [&] { a = best_forest_serial(p, h); });
    const double tp = best_of(2, [&] { b = best_forest_parallel(p, h); });
    report("best_forest", ts, tp, a.mask == b.mask && a.cost == b.cost && a.flow == b.flow);
  }
}
