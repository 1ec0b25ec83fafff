#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "truncreg/dataset.hpp"
#include "truncreg/likelihood.hpp"
#include "truncreg/linalg.hpp"
#include "truncreg/projection.hpp"

namespace truncreg {

// Learning-rate schedules: eta_t = c/sqrt(t); eta_t = 1/(zeta t) with zeta
// resolved from the empirical Hessian when not given; eta_t stepped down by
// `factor` every `every` steps.
struct SqrtDecay {
  double c = 0.1;
};
struct StronglyConvex {
  double zeta = 0.0;  // <= 0 resolves to max(1e-6, min eig of the Hessian
                      // at the initialization point over the PSGD part)
};
struct StepDecay {
  double lr0 = 0.1;
  double factor = 0.9;
  int every = 100;
};
using Schedule = std::variant<SqrtDecay, StronglyConvex, StepDecay>;

// Stop once the mean exact gradient on a held-out 10% of the PSGD part has
// norm <= grad_norm_tol, checked every check_every steps.
struct EarlyStop {
  int check_every = 100;
  double grad_norm_tol = 0.1;
};

struct FitConfig {
  Schedule schedule = SqrtDecay{};
  int steps = 2500;
  int batch = 10;
  std::size_t max_attempts = 10000;
  double survival_bound_a = 0.1;
  double beta = 16.0;
  std::uint64_t seed = 1;
  std::optional<EarlyStop> early_stop;
  bool record_trajectory = false;
};

double schedule_eta(const Schedule& s, int t, double zeta_resolved);

struct FitDiagnostics {
  double final_grad_norm = 0.0;
  long projections_applied = 0;
  std::uint64_t rejection_draws_total = 0;
  int steps_run = 0;
  bool no_majority = false;  // set by boost when no run had a majority
};

struct TrajectoryPoint {
  int step;
  Vec v;
  double lambda;
};

struct FitResult {
  ModelParams params;    // (w_hat, sigma^2_hat) = (v/lambda, 1/lambda)
  NaturalParams natural; // inside `domain` by construction
  ProjectionDomain domain;
  double zeta_used = 0.0;
  FitDiagnostics diagnostics;
  std::vector<TrajectoryPoint> trajectory;  // when record_trajectory
};

struct ThreeSplit {
  Dataset part1, part2, part3;
};

// Disjoint contiguous parts of sizes floor(N/3), floor(N/3), remainder-to-
// part3, preserving input order.
ThreeSplit split_three(const Dataset& data);

// Size of the PSGD part after the three-way split.
int psgd_part_size(int n_total);

struct Initialization {
  Vec v0;
  double lambda0;
  ProjectionDomain domain;
  OlsEstimate ols;
};

// OLS on part1 for w0, mean squared residual on part2 for sigma0^2, then
// lambda0 = 1/sigma0^2 and v0 = the radial rescale of w0/sigma0^2 into the
// cone slice at lambda0.
Initialization initialize(const Dataset& part1, const Dataset& part2,
                          const FitConfig& cfg);

// Algorithm: split, initialize, then `steps` projected stochastic gradient
// iterations over the PSGD part (cycling with per-epoch reshuffle when steps
// exceed the part size). Deterministic given (data, set, cfg).
FitResult fit(const Dataset& data, const TruncationSet& set,
              const FitConfig& cfg);

// Runs fit on independent resplits with seeds seed+1..seed+runs and returns
// the first result within eps (||.||_2 on w plus |.| on sigma^2) of at least
// half of the rest; falls back to the most central run and flags
// no_majority when no run has a majority.
FitResult boost(const Dataset& data, const TruncationSet& set,
                const FitConfig& cfg, int runs, double eps);

// Selection rule of boost, exposed for tests. Failed runs (nullopt) count as
// distant from everything. Returns the chosen index.
std::size_t boost_select(
    const std::vector<std::optional<ModelParams>>& runs, double eps,
    bool* no_majority);

}  // namespace truncreg
