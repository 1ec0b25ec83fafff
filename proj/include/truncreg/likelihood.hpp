#pragma once

#include <cstdint>
#include <span>

#include "truncreg/dataset.hpp"
#include "truncreg/mat.hpp"
#include "truncreg/moments.hpp"
#include "truncreg/rng.hpp"
#include "truncreg/truncation.hpp"

namespace truncreg {

// (w, sigma^2) and its reparameterization (v, lambda) = (w/sigma^2, 1/sigma^2);
// the negative log-likelihood is convex in the latter.
struct ModelParams {
  Vec w;
  double sigma_sq;
};

struct NaturalParams {
  Vec v;
  double lambda;
};

NaturalParams to_natural(const ModelParams& p);
ModelParams to_model(const NaturalParams& p);

struct GradientVector {
  Vec dv;
  double dlambda;

  double norm() const {
    double s = dlambda * dlambda;
    for (double x : dv) s += x * x;
    return std::sqrt(s);
  }
};

// Per-sample negative log-likelihood
//   l(v, lambda; x, y) = (lambda y^2 - 2 y v^T x)/2
//                        + log Int_S exp(-(lambda z^2 - 2 z v^T x)/2) dz
// with the log-partition in closed form by completing the square.
// Interval-union sets only.
double nll(const NaturalParams& p, const Sample& s, const TruncationSet& set);

// dl/dv = (E_Q[z] - y) x,  dl/dlambda = (y^2 - E_Q[z^2])/2, where
// Q = N(v^T x / lambda, 1/lambda, S). Interval-union sets only.
GradientVector grad_exact(const NaturalParams& p, const Sample& s,
                          const TruncationSet& set);

// Same shape with E_Q moments replaced by `batch` rejection draws; the
// expectation over the RNG equals grad_exact. Works with oracle sets.
GradientVector grad_stochastic(const NaturalParams& p, const Sample& s,
                               const TruncationSet& set, Rng& rng, int batch,
                               std::size_t max_attempts = 10000,
                               std::uint64_t* draws = nullptr);

// Dataset-averaged kernels. OpenMP-parallel over fixed-size blocks whose
// partial sums are merged in block order, so results do not depend on the
// thread count. Interval-union sets only.
double nll_mean(const NaturalParams& p, const Dataset& data,
                const TruncationSet& set);
GradientVector mean_gradient(const NaturalParams& p, const Dataset& data,
                             const TruncationSet& set);
// (k+1)x(k+1) average of the per-sample blocks
//   [ Var(z) x x^T        -Cov(z^2/2, z) x ]
//   [ -Cov(z^2/2, z) x^T   Var(z^2/2)      ]
// with Q-moments up to order 4 in closed form.
DenseMatrix empirical_hessian(const NaturalParams& p, const Dataset& data,
                              const TruncationSet& set);
// (1/n) sum g_i g_i^T with g_i = grad_exact on sample i.
DenseMatrix gamma_matrix(const NaturalParams& p, const Dataset& data,
                         const TruncationSet& set);

// Single-thread reference implementations (plain left-to-right accumulation).
// Kept for tests and the benchmark target.
namespace serial {
double nll_mean(const NaturalParams& p, const Dataset& data,
                const TruncationSet& set);
GradientVector mean_gradient(const NaturalParams& p, const Dataset& data,
                             const TruncationSet& set);
DenseMatrix empirical_hessian(const NaturalParams& p, const Dataset& data,
                              const TruncationSet& set);
DenseMatrix gamma_matrix(const NaturalParams& p, const Dataset& data,
                         const TruncationSet& set);
}  // namespace serial

}  // namespace truncreg
