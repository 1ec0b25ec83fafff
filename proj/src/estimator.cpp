#include "truncreg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "truncreg/errors.hpp"
#include "truncreg/rng.hpp"

namespace truncreg {

ThreeSplit split_three(const Dataset& data) {
  const std::size_t n = data.n();
  if (n < 3)
    throw TooFewSamples("split_three: need at least 3 samples, got " +
                        std::to_string(n));
  const std::size_t third = n / 3;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  ThreeSplit s;
  s.part1 = data.subset({idx.data(), third});
  s.part2 = data.subset({idx.data() + third, third});
  // remainder goes to the PSGD part
  s.part3 = data.subset({idx.data() + 2 * third, n - 2 * third});
  return s;
}

int psgd_part_size(int n_total) { return n_total - 2 * (n_total / 3); }

Initialization initialize(const Dataset& part1, const Dataset& part2,
                          const FitConfig& cfg) {
  Initialization init;
  init.ols.w0 = ols_fit(part1.design_matrix(), part1.ys);
  init.ols.sigma0_sq =
      residual_variance(part2.design_matrix(), part2.ys, init.ols.w0);
  if (init.ols.sigma0_sq < 1e-12)
    throw DegenerateVariance(
        "initialize: OLS residual variance is (near) zero; the data look "
        "exactly linear");
  init.domain = build_domain(init.ols.sigma0_sq, cfg.survival_bound_a,
                             cfg.beta);
  init.lambda0 = 1.0 / init.ols.sigma0_sq;  // inside the lambda-interval

  init.v0.resize(init.ols.w0.size());
  for (std::size_t i = 0; i < init.v0.size(); ++i)
    init.v0[i] = init.ols.w0[i] / init.ols.sigma0_sq;
  const double r = norm2(init.v0);
  const double rmax = std::sqrt(cfg.beta) * init.lambda0;
  if (r > rmax) {
    const double s = rmax / r;
    for (double& x : init.v0) x *= s;
  }
  return init;
}

double schedule_eta(const Schedule& s, int t, double zeta_resolved) {
  if (const auto* sq = std::get_if<SqrtDecay>(&s))
    return sq->c / std::sqrt(static_cast<double>(t));
  if (std::holds_alternative<StronglyConvex>(s))
    return 1.0 / (zeta_resolved * static_cast<double>(t));
  const auto& sd = std::get<StepDecay>(s);
  return sd.lr0 * std::pow(sd.factor, t / sd.every);
}

namespace {

double resolve_zeta(const Schedule& schedule, const NaturalParams& start,
                    const Dataset& part3, const TruncationSet& set) {
  if (const auto* sc = std::get_if<StronglyConvex>(&schedule))
    if (sc->zeta > 0.0) return sc->zeta;
  if (!set.is_interval_union()) {
    if (std::holds_alternative<StronglyConvex>(schedule))
      throw std::invalid_argument(
          "fit: the strongly-convex schedule needs an explicit zeta for "
          "oracle truncation sets");
    return 1.0;  // placeholder; inference needs interval sets anyway
  }
  const EigResult eig = sym_eig(empirical_hessian(start, part3, set));
  return std::max(1e-6, eig.values.front());
}

}  // namespace

FitResult fit(const Dataset& data, const TruncationSet& set,
              const FitConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("fit: steps must be >= 1");
  if (cfg.batch < 1) throw std::invalid_argument("fit: batch must be >= 1");
  if (cfg.early_stop && !set.is_interval_union())
    throw std::invalid_argument(
        "fit: early stopping needs exact gradients, i.e. an interval-union "
        "set");

  const ThreeSplit parts = split_three(data);
  const Initialization init = initialize(parts.part1, parts.part2, cfg);

  NaturalParams theta{init.v0, init.lambda0};
  const double zeta = resolve_zeta(cfg.schedule, theta, parts.part3, set);

  // Optional validation holdout: last 10% of the PSGD part.
  Dataset train = parts.part3;
  Dataset val(parts.part3.k);
  if (cfg.early_stop) {
    const std::size_t n3 = parts.part3.n();
    const std::size_t nval = std::max<std::size_t>(1, n3 / 10);
    if (nval >= n3)
      throw TooFewSamples("fit: PSGD part too small for a validation split");
    std::vector<std::size_t> idx(n3);
    std::iota(idx.begin(), idx.end(), 0);
    train = parts.part3.subset({idx.data(), n3 - nval});
    val = parts.part3.subset({idx.data() + (n3 - nval), nval});
  }

  Rng rng(cfg.seed);
  const std::size_t m = train.n();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);

  FitResult result;
  result.domain = init.domain;
  result.zeta_used = zeta;
  if (cfg.record_trajectory) result.trajectory.reserve(cfg.steps);

  for (int t = 1; t <= cfg.steps; ++t) {
    const std::size_t pos = static_cast<std::size_t>(t - 1) % m;
    if (pos == 0 && t > 1) {
      // new epoch: reshuffle the cycling order
      for (std::size_t i = m - 1; i > 0; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng.uniform01() * (i + 1));
        std::swap(order[i], order[std::min(j, i)]);
      }
    }
    const GradientVector u = grad_stochastic(
        theta, train.sample(order[pos]), set, rng, cfg.batch,
        cfg.max_attempts, &result.diagnostics.rejection_draws_total);

    const double eta = schedule_eta(cfg.schedule, t, zeta);
    Vec v_step = theta.v;
    for (std::size_t i = 0; i < v_step.size(); ++i)
      v_step[i] -= eta * u.dv[i];
    const double lambda_step = theta.lambda - eta * u.dlambda;

    NaturalParams projected = project(init.domain, v_step, lambda_step);
    if (projected.lambda != lambda_step || projected.v != v_step)
      ++result.diagnostics.projections_applied;
    theta = std::move(projected);

    result.diagnostics.steps_run = t;
    if (cfg.record_trajectory)
      result.trajectory.push_back({t, theta.v, theta.lambda});

    if (cfg.early_stop && t % cfg.early_stop->check_every == 0 &&
        mean_gradient(theta, val, set).norm() <=
            cfg.early_stop->grad_norm_tol)
      break;
  }

  result.natural = theta;
  result.params = to_model(theta);
  if (set.is_interval_union()) {
    result.diagnostics.final_grad_norm =
        mean_gradient(theta, parts.part3, set).norm();
  } else {
    GradientVector acc{Vec(parts.part3.k, 0.0), 0.0};
    for (std::size_t i = 0; i < parts.part3.n(); ++i) {
      const GradientVector g = grad_stochastic(
          theta, parts.part3.sample(i), set, rng, cfg.batch, cfg.max_attempts,
          &result.diagnostics.rejection_draws_total);
      for (std::size_t a = 0; a < acc.dv.size(); ++a) acc.dv[a] += g.dv[a];
      acc.dlambda += g.dlambda;
    }
    const double inv_n = 1.0 / static_cast<double>(parts.part3.n());
    for (double& x : acc.dv) x *= inv_n;
    acc.dlambda *= inv_n;
    result.diagnostics.final_grad_norm = acc.norm();
  }
  return result;
}

std::size_t boost_select(
    const std::vector<std::optional<ModelParams>>& runs, double eps,
    bool* no_majority) {
  const std::size_t r = runs.size();
  if (r == 0) throw std::invalid_argument("boost_select: no runs");
  const auto dist = [&](std::size_t i, std::size_t j) {
    if (!runs[i] || !runs[j]) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t a = 0; a < runs[i]->w.size(); ++a) {
      const double d = runs[i]->w[a] - runs[j]->w[a];
      s += d * d;
    }
    return std::sqrt(s) + std::fabs(runs[i]->sigma_sq - runs[j]->sigma_sq);
  };

  const std::size_t need = (r - 1 + 1) / 2;  // ceil((runs-1)/2)
  for (std::size_t i = 0; i < r; ++i) {
    if (!runs[i]) continue;
    std::size_t close = 0;
    for (std::size_t j = 0; j < r; ++j)
      if (j != i && dist(i, j) <= eps) ++close;
    if (close >= need) {
      if (no_majority) *no_majority = false;
      return i;
    }
  }

  // No majority: fall back to the most central run (smallest median
  // distance to the others).
  if (no_majority) *no_majority = true;
  std::size_t best = r;
  double best_med = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r; ++i) {
    if (!runs[i]) continue;
    Vec ds;
    for (std::size_t j = 0; j < r; ++j)
      if (j != i) ds.push_back(dist(i, j));
    double med = 0.0;
    if (!ds.empty()) {
      std::sort(ds.begin(), ds.end());
      med = (ds.size() % 2) ? ds[ds.size() / 2]
                            : 0.5 * (ds[ds.size() / 2 - 1] + ds[ds.size() / 2]);
    }
    if (med < best_med || best == r) {
      best_med = med;
      best = i;
    }
  }
  if (best == r) throw Error("boost: every run failed");
  return best;
}

FitResult boost(const Dataset& data, const TruncationSet& set,
                const FitConfig& cfg, int runs, double eps) {
  if (runs < 1) throw std::invalid_argument("boost: runs must be >= 1");
  std::vector<std::optional<FitResult>> results(runs);
  std::vector<std::exception_ptr> errs(runs);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < runs; ++r) {
    try {
      // independent resplit: permute before the three-way split
      Rng perm_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r) + 1));
      std::vector<std::size_t> idx(data.n());
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t i = idx.size() - 1; i > 0; --i) {
        const std::size_t j =
            static_cast<std::size_t>(perm_rng.uniform01() * (i + 1));
        std::swap(idx[i], idx[std::min(j, i)]);
      }
      FitConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r) + 1;
      results[r] = fit(data.subset(idx), set, run_cfg);
    } catch (...) {
      errs[r] = std::current_exception();
    }
  }

  std::vector<std::optional<ModelParams>> params(runs);
  bool any_ok = false;
  for (int r = 0; r < runs; ++r) {
    if (results[r]) {
      params[r] = results[r]->params;
      any_ok = true;
    }
  }
  if (!any_ok) {
    for (int r = 0; r < runs; ++r)
      if (errs[r]) std::rethrow_exception(errs[r]);
    throw Error("boost: every run failed");
  }

  bool no_majority = false;
  const std::size_t pick = boost_select(params, eps, &no_majority);
  FitResult out = *results[pick];
  out.diagnostics.no_majority = no_majority;
  return out;
}

}  // namespace truncreg
