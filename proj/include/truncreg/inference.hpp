#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "truncreg/estimator.hpp"
#include "truncreg/synth.hpp"

namespace truncreg {

// Plug-in pieces of the asymptotic law of sqrt(n) ((w_hat, s2_hat) - truth):
// Sigma solves (H_hat - zeta/2 I) Sigma + Sigma (H_hat - zeta/2 I) = Gamma,
// R is the inverse Jacobian of (v, lambda) -> (w, sigma^2) at the estimate,
// and S = (1/zeta) J Sigma J^T is the covariance itself (J = R^{-1}).
struct AsymptoticCovariance {
  DenseMatrix S_matrix;  // (k+1)x(k+1), symmetric PSD
  DenseMatrix Sigma;
  DenseMatrix R;
  double zeta;
  ModelParams center;
  int k;
};

AsymptoticCovariance asymptotic_covariance(const FitResult& result,
                                           const Dataset& part3,
                                           const TruncationSet& set);

// { theta : (theta - center)^T M (theta - center) <= r }, theta = (w, s2).
struct ConfidenceRegion {
  ModelParams center;
  DenseMatrix shape;  // M
  double radius;      // r
};

// M = R^T Sigma^{-1} R and r = chi2_quantile(k+1, 1-alpha) / (zeta n); n is
// the number of PSGD steps the estimate came from. main_text_shape = true
// swaps in M = R^T Sigma R for comparison (not covariance-consistent; off by
// default).
ConfidenceRegion confidence_region(const AsymptoticCovariance& cov, long n,
                                   double alpha,
                                   bool main_text_shape = false);

bool region_contains(const ConfidenceRegion& region,
                     const ModelParams& candidate);

struct CoverageTrial {
  bool ok = false;
  bool covered = false;
  std::string error;
};

struct CoverageResult {
  double coverage = 0.0;  // covered / (trials - failures)
  std::vector<CoverageTrial> per_trial;
  int failures = 0;
};

// Per trial: generate, fit (strongly-convex schedule required), build the
// region, test whether it contains the generating truth. Trials run in
// parallel on independent RNG streams; failures are recorded and excluded
// from the denominator.
CoverageResult coverage_simulation(const GenConfig& gen,
                                   const FitConfig& fit_cfg, int trials,
                                   double alpha, std::uint64_t seed,
                                   int jobs = 0);

}  // namespace truncreg
