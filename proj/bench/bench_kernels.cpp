// Compares the OpenMP dataset kernels against the serial reference
// implementations: wall time, speedup, and max deviation.
//
//   truncreg_bench [n] [k] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "truncreg/likelihood.hpp"
#include "truncreg/synth.hpp"

using namespace truncreg;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    const auto t1 = Clock::now();
    best = std::min(best,
                    std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

double max_entry_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i)
    d = std::max(d, std::fabs(a.a[i] - b.a[i]));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 200000;
  const int k = argc > 2 ? std::atoi(argv[2]) : 10;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

  GenConfig gen;
  gen.k = k;
  gen.n_observed = n;
  gen.w_star = WStarUniformPm1{};
  gen.x_dist = UniformBox{-5.0, 5.0};
  gen.set = TruncationSet::parse("[0,inf)");
  gen.seed = 7;
  const GeneratedData data = generate(gen);

  NaturalParams p = to_natural(data.truth);

#if defined(_OPENMP)
  std::printf("n=%d k=%d threads=%d repeats=%d\n", n, k, omp_get_max_threads(),
              repeats);
#else
  std::printf("n=%d k=%d threads=1 (no OpenMP) repeats=%d\n", n, k, repeats);
#endif
  std::printf("%-20s %12s %12s %9s %12s\n", "kernel", "serial[s]", "omp[s]",
              "speedup", "max|diff|");

  {
    double ref = 0.0, par = 0.0;
    const double ts = time_best_of(
        repeats, [&] { ref = serial::nll_mean(p, data.dataset, gen.set); });
    const double tp = time_best_of(
        repeats, [&] { par = nll_mean(p, data.dataset, gen.set); });
    std::printf("%-20s %12.4f %12.4f %8.2fx %12.3e\n", "nll_mean", ts, tp,
                ts / tp, std::fabs(ref - par));
  }
  {
    GradientVector ref, par;
    const double ts = time_best_of(repeats, [&] {
      ref = serial::mean_gradient(p, data.dataset, gen.set);
    });
    const double tp = time_best_of(
        repeats, [&] { par = mean_gradient(p, data.dataset, gen.set); });
    double d = std::fabs(ref.dlambda - par.dlambda);
    for (int a = 0; a < k; ++a)
      d = std::max(d, std::fabs(ref.dv[a] - par.dv[a]));
    std::printf("%-20s %12.4f %12.4f %8.2fx %12.3e\n", "mean_gradient", ts, tp,
                ts / tp, d);
  }
  {
    DenseMatrix ref, par;
    const double ts = time_best_of(repeats, [&] {
      ref = serial::empirical_hessian(p, data.dataset, gen.set);
    });
    const double tp = time_best_of(
        repeats, [&] { par = empirical_hessian(p, data.dataset, gen.set); });
    std::printf("%-20s %12.4f %12.4f %8.2fx %12.3e\n", "empirical_hessian",
                ts, tp, ts / tp, max_entry_diff(ref, par));
  }
  {
    DenseMatrix ref, par;
    const double ts = time_best_of(repeats, [&] {
      ref = serial::gamma_matrix(p, data.dataset, gen.set);
    });
    const double tp = time_best_of(
        repeats, [&] { par = gamma_matrix(p, data.dataset, gen.set); });
    std::printf("%-20s %12.4f %12.4f %8.2fx %12.3e\n", "gamma_matrix", ts, tp,
                ts / tp, max_entry_diff(ref, par));
  }
  return 0;
}
