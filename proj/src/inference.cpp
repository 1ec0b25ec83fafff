#include "truncreg/inference.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

#include "truncreg/errors.hpp"
#include "truncreg/linalg.hpp"
#include "truncreg/rng.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace truncreg {

namespace {

// R = J^{-1} with J the Jacobian of (v, lambda) -> (v/lambda, 1/lambda):
// blocks (1/s2) I, -w/s2^2, 0, -1/s2^2.
DenseMatrix r_matrix(const ModelParams& p) {
  const int k = static_cast<int>(p.w.size());
  const double s2 = p.sigma_sq;
  DenseMatrix r(k + 1, k + 1);
  for (int i = 0; i < k; ++i) {
    r(i, i) = 1.0 / s2;
    r(i, k) = -p.w[i] / (s2 * s2);
  }
  r(k, k) = -1.0 / (s2 * s2);
  return r;
}

DenseMatrix j_matrix(const ModelParams& p) {
  const int k = static_cast<int>(p.w.size());
  const double s2 = p.sigma_sq;
  DenseMatrix j(k + 1, k + 1);
  for (int i = 0; i < k; ++i) {
    j(i, i) = s2;
    j(i, k) = -p.w[i] * s2;
  }
  j(k, k) = -s2 * s2;
  return j;
}

}  // namespace

AsymptoticCovariance asymptotic_covariance(const FitResult& result,
                                           const Dataset& part3,
                                           const TruncationSet& set) {
  const double zeta = result.zeta_used;
  if (!(zeta > 0.0))
    throw std::invalid_argument("asymptotic_covariance: zeta must be > 0");

  const DenseMatrix hess = empirical_hessian(result.natural, part3, set);
  DenseMatrix shifted = hess;
  for (int i = 0; i < shifted.rows; ++i) shifted(i, i) -= 0.5 * zeta;

  const EigResult eig = sym_eig(shifted);
  if (!(eig.values.front() > 0.0))
    throw NotPositiveDefinite(
        "asymptotic_covariance: (H - zeta/2 I) has min eigenvalue " +
        std::to_string(eig.values.front()) + " with zeta = " +
        std::to_string(zeta) +
        "; rerun with a smaller zeta (min eigenvalue of H is " +
        std::to_string(eig.values.front() + 0.5 * zeta) + ")");

  const DenseMatrix gamma = gamma_matrix(result.natural, part3, set);

  AsymptoticCovariance cov;
  cov.Sigma = solve_lyapunov(shifted, gamma);
  cov.R = r_matrix(result.params);
  cov.zeta = zeta;
  cov.center = result.params;
  cov.k = part3.k;

  const DenseMatrix j = j_matrix(result.params);
  cov.S_matrix = matmul(matmul(j, cov.Sigma), transpose(j));
  for (double& x : cov.S_matrix.a) x /= zeta;
  symmetrize(cov.S_matrix);
  return cov;
}

ConfidenceRegion confidence_region(const AsymptoticCovariance& cov, long n,
                                   double alpha, bool main_text_shape) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("confidence_region: alpha must be in (0, 1)");
  if (n < 1)
    throw std::invalid_argument("confidence_region: n must be >= 1");

  DenseMatrix middle = cov.Sigma;
  if (!main_text_shape) {
    const EigResult eig = sym_eig(cov.Sigma);
    if (!(eig.values.front() > 1e-12 * eig.values.back()))
      throw SingularSigma(
          "confidence_region: Lyapunov solution is numerically singular "
          "(min eigenvalue " +
          std::to_string(eig.values.front()) + ")");
    // Sigma^{-1} = V diag(1/d) V^T
    DenseMatrix inv(middle.rows, middle.cols);
    for (int i = 0; i < inv.rows; ++i)
      for (int j = 0; j < inv.cols; ++j) {
        double s = 0.0;
        for (int t = 0; t < inv.rows; ++t)
          s += eig.vectors(i, t) * eig.vectors(j, t) / eig.values[t];
        inv(i, j) = s;
      }
    middle = inv;
  }

  ConfidenceRegion region;
  region.center = cov.center;
  region.shape = matmul(matmul(transpose(cov.R), middle), cov.R);
  symmetrize(region.shape);
  region.radius = chi2_quantile(cov.k + 1, 1.0 - alpha) /
                  (cov.zeta * static_cast<double>(n));
  return region;
}

bool region_contains(const ConfidenceRegion& region,
                     const ModelParams& candidate) {
  if (candidate.w.size() != region.center.w.size())
    throw std::invalid_argument("region_contains: dimension mismatch");
  const int k = static_cast<int>(candidate.w.size());
  Vec diff(k + 1);
  for (int i = 0; i < k; ++i) diff[i] = candidate.w[i] - region.center.w[i];
  diff[k] = candidate.sigma_sq - region.center.sigma_sq;
  const Vec md = matvec(region.shape, diff);
  return dot(diff, md) <= region.radius;
}

CoverageResult coverage_simulation(const GenConfig& gen,
                                   const FitConfig& fit_cfg, int trials,
                                   double alpha, std::uint64_t seed,
                                   int jobs) {
  if (trials < 1)
    throw std::invalid_argument("coverage_simulation: trials must be >= 1");
  if (!std::holds_alternative<StronglyConvex>(fit_cfg.schedule))
    throw std::invalid_argument(
        "coverage_simulation: the asymptotic law assumes the strongly-convex "
        "schedule eta_t = 1/(zeta t)");
#if defined(_OPENMP)
  if (jobs > 0) omp_set_num_threads(jobs);
#endif

  CoverageResult out;
  out.per_trial.resize(trials);

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    CoverageTrial trial;
    try {
      GenConfig g = gen;
      g.seed = mix_seed(seed, 2 * static_cast<std::uint64_t>(t) + 1);
      FitConfig f = fit_cfg;
      f.seed = mix_seed(seed, 2 * static_cast<std::uint64_t>(t) + 2);

      const GeneratedData data = generate(g);
      const ThreeSplit parts = split_three(data.dataset);
      const FitResult result = fit(data.dataset, gen.set, f);
      const AsymptoticCovariance cov =
          asymptotic_covariance(result, parts.part3, gen.set);
      const ConfidenceRegion region =
          confidence_region(cov, result.diagnostics.steps_run, alpha);
      trial.covered = region_contains(region, data.truth);
      trial.ok = true;
    } catch (const std::exception& e) {
      trial.error = e.what();
    }
    out.per_trial[t] = trial;
  }

  int covered = 0;
  for (const auto& trial : out.per_trial) {
    if (!trial.ok)
      ++out.failures;
    else if (trial.covered)
      ++covered;
  }
  const int denom = trials - out.failures;
  out.coverage = denom > 0 ? static_cast<double>(covered) / denom : 0.0;
  return out;
}

}  // namespace truncreg
