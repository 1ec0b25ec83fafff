#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "truncreg/dataset.hpp"
#include "truncreg/estimator.hpp"
#include "truncreg/truncation.hpp"

namespace truncreg {

struct UniformBox {
  double lo = -5.0;
  double hi = 5.0;
};
struct StandardNormalX {};
// Standard normal draws rescaled by 1/max(1, ||z||) so that ||x|| <= 1.
struct NormalizedStandardNormalX {};
using XDist = std::variant<UniformBox, StandardNormalX,
                           NormalizedStandardNormalX>;

struct WStarUniformPm1 {};  // coordinates iid uniform on (-1, 1)
struct WStarOnes {};
struct WStarExplicit {
  Vec w;
};
using WStarSpec = std::variant<WStarUniformPm1, WStarOnes, WStarExplicit>;

struct GenConfig {
  int k = 1;
  int n_observed = 1;
  WStarSpec w_star = WStarOnes{};
  double sigma_star_sq = 1.0;
  XDist x_dist = StandardNormalX{};
  TruncationSet set = TruncationSet::real_line();
  std::uint64_t seed = 1;
  long max_world_draws = 0;  // 0 -> 1000 * n_observed
};

struct GeneratedData {
  Dataset dataset;
  double acceptance_rate;
  long world_draws;
  ModelParams truth;
};

// World model: draw x, set y = w*^T x + eps with eps ~ N(0, sigma*^2), keep
// the pair iff y lands in the set; repeat until n_observed pairs survive.
// Deterministic given the seed.
GeneratedData generate(const GenConfig& cfg);

struct Fig1Row {
  double sigma2_true;
  std::string method;  // "psgd" or "ols"
  double w_err;
  double sigma2_err;
  std::uint64_t seed;
  bool failed;
};

// Noise-variance sweep: per seed the ground-truth weights and the feature
// stream are fixed across sigma*^2 cells (the generator consumes the same
// number of engine words per candidate regardless of acceptance); each cell
// fits PSGD and plain OLS against the truth.
std::vector<Fig1Row> experiment_fig1(const std::vector<std::uint64_t>& seeds,
                                     const std::vector<double>& sigma_grid,
                                     const GenConfig& base,
                                     const FitConfig& fit_cfg, int jobs = 0);

struct Fig2Row {
  int n;
  double median_total_error;
  int failed_trials;
};

// Sample-count sweep: one master dataset, per-trial subsampling without
// replacement, median of ||w_hat - w*|| + |sigma^2_hat - sigma*^2| over
// seeds for each n.
std::vector<Fig2Row> experiment_fig2(const std::vector<int>& n_grid,
                                     const GenConfig& base,
                                     const FitConfig& fit_cfg,
                                     const std::vector<std::uint64_t>& seeds,
                                     int jobs = 0);

}  // namespace truncreg
