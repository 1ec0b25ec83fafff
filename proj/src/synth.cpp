#include "truncreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "truncreg/errors.hpp"
#include "truncreg/linalg.hpp"
#include "truncreg/rng.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace truncreg {

namespace {

Vec resolve_w_star(const WStarSpec& spec, int k, Rng& rng) {
  if (std::holds_alternative<WStarOnes>(spec)) return Vec(k, 1.0);
  if (const auto* e = std::get_if<WStarExplicit>(&spec)) {
    if (static_cast<int>(e->w.size()) != k)
      throw std::invalid_argument("generate: explicit w* has wrong dimension");
    return e->w;
  }
  Vec w(k);
  for (double& x : w) x = rng.uniform(-1.0, 1.0);
  return w;
}

void draw_x(const XDist& dist, Rng& rng, Vec& x) {
  if (const auto* box = std::get_if<UniformBox>(&dist)) {
    for (double& c : x) c = rng.uniform(box->lo, box->hi);
    return;
  }
  for (double& c : x) c = rng.normal();
  if (std::holds_alternative<NormalizedStandardNormalX>(dist)) {
    const double r = norm2(x);
    if (r > 1.0)
      for (double& c : x) c /= r;
  }
}

void set_jobs(int jobs) {
#if defined(_OPENMP)
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

double median(Vec values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2) ? values[n / 2]
                 : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

GeneratedData generate(const GenConfig& cfg) {
  if (cfg.n_observed < 1)
    throw std::invalid_argument("generate: n_observed must be >= 1");
  if (!(cfg.sigma_star_sq > 0.0))
    throw std::invalid_argument("generate: sigma_star_sq must be > 0");
  const long budget = cfg.max_world_draws > 0
                          ? cfg.max_world_draws
                          : 1000L * cfg.n_observed;
  if (budget < cfg.n_observed)
    throw std::invalid_argument(
        "generate: max_world_draws below n_observed");

  Rng rng(cfg.seed);
  GeneratedData out{Dataset(cfg.k), 0.0, 0, {}};
  out.truth.w = resolve_w_star(cfg.w_star, cfg.k, rng);
  out.truth.sigma_sq = cfg.sigma_star_sq;
  const double sigma = std::sqrt(cfg.sigma_star_sq);

  Vec x(cfg.k);
  while (static_cast<int>(out.dataset.n()) < cfg.n_observed) {
    if (out.world_draws >= budget)
      throw WorldBudgetExceeded(
          "generate: exhausted " + std::to_string(budget) +
          " world draws before collecting " +
          std::to_string(cfg.n_observed) + " observed pairs");
    ++out.world_draws;
    draw_x(cfg.x_dist, rng, x);
    const double y = dot(x, out.truth.w) + sigma * rng.normal();
    if (cfg.set.contains(y)) out.dataset.append(x, y);
  }
  out.acceptance_rate =
      static_cast<double>(cfg.n_observed) / static_cast<double>(out.world_draws);
  return out;
}

std::vector<Fig1Row> experiment_fig1(const std::vector<std::uint64_t>& seeds,
                                     const std::vector<double>& sigma_grid,
                                     const GenConfig& base,
                                     const FitConfig& fit_cfg, int jobs) {
  if (seeds.empty() || sigma_grid.empty())
    throw std::invalid_argument("experiment_fig1: empty grid");
  set_jobs(jobs);

  const std::size_t cells = sigma_grid.size() * seeds.size();
  std::vector<Fig1Row> psgd_rows(cells), ols_rows(cells);

#pragma omp parallel for schedule(dynamic)
  for (long long cell = 0; cell < static_cast<long long>(cells); ++cell) {
    const std::size_t si = cell / seeds.size();
    const std::size_t ei = cell % seeds.size();
    const double s2 = sigma_grid[si];
    const std::uint64_t seed = seeds[ei];

    Fig1Row psgd{s2, "psgd", 0.0, 0.0, seed, true};
    Fig1Row ols{s2, "ols", 0.0, 0.0, seed, true};
    try {
      GenConfig g = base;
      g.seed = seed;
      g.sigma_star_sq = s2;
      const GeneratedData gen = generate(g);
      const auto err_w = [&](const Vec& w) {
        double s = 0.0;
        for (std::size_t a = 0; a < w.size(); ++a) {
          const double d = w[a] - gen.truth.w[a];
          s += d * d;
        }
        return std::sqrt(s);
      };

      try {
        const DenseMatrix X = gen.dataset.design_matrix();
        const Vec w_ols = ols_fit(X, gen.dataset.ys);
        ols.w_err = err_w(w_ols);
        ols.sigma2_err =
            std::fabs(residual_variance(X, gen.dataset.ys, w_ols) - s2);
        ols.failed = false;
      } catch (const std::exception&) {
      }

      FitConfig f = fit_cfg;
      f.seed = mix_seed(fit_cfg.seed, static_cast<std::uint64_t>(cell) + 1);
      const FitResult r = fit(gen.dataset, base.set, f);
      psgd.w_err = err_w(r.params.w);
      psgd.sigma2_err = std::fabs(r.params.sigma_sq - s2);
      psgd.failed = false;
    } catch (const std::exception&) {
    }
    psgd_rows[cell] = psgd;
    ols_rows[cell] = ols;
  }

  std::vector<Fig1Row> rows;
  rows.reserve(2 * cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    rows.push_back(psgd_rows[cell]);
    rows.push_back(ols_rows[cell]);
  }
  return rows;
}

std::vector<Fig2Row> experiment_fig2(const std::vector<int>& n_grid,
                                     const GenConfig& base,
                                     const FitConfig& fit_cfg,
                                     const std::vector<std::uint64_t>& seeds,
                                     int jobs) {
  if (n_grid.empty() || seeds.empty())
    throw std::invalid_argument("experiment_fig2: empty grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw std::invalid_argument("experiment_fig2: n_grid must be ascending");
  set_jobs(jobs);

  GenConfig master_cfg = base;
  master_cfg.n_observed = n_grid.back();
  const GeneratedData master = generate(master_cfg);

  const std::size_t cells = n_grid.size() * seeds.size();
  std::vector<double> errors(cells,
                             std::numeric_limits<double>::quiet_NaN());

#pragma omp parallel for schedule(dynamic)
  for (long long cell = 0; cell < static_cast<long long>(cells); ++cell) {
    const std::size_t ni = cell / seeds.size();
    const std::size_t ei = cell % seeds.size();
    const std::size_t n = static_cast<std::size_t>(n_grid[ni]);
    try {
      // subsample without replacement: partial Fisher-Yates
      Rng sub_rng(mix_seed(base.seed,
                           0x516u + static_cast<std::uint64_t>(cell)));
      std::vector<std::size_t> idx(master.dataset.n());
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(sub_rng.uniform01() *
                                         (idx.size() - i));
        std::swap(idx[i], idx[std::min(j, idx.size() - 1)]);
      }
      const Dataset sub = master.dataset.subset({idx.data(), n});

      FitConfig f = fit_cfg;
      f.seed = mix_seed(fit_cfg.seed, static_cast<std::uint64_t>(cell) + 1);
      const FitResult r = fit(sub, base.set, f);
      double werr = 0.0;
      for (std::size_t a = 0; a < r.params.w.size(); ++a) {
        const double d = r.params.w[a] - master.truth.w[a];
        werr += d * d;
      }
      errors[cell] = std::sqrt(werr) +
                     std::fabs(r.params.sigma_sq - master.truth.sigma_sq);
    } catch (const std::exception&) {
    }
  }

  std::vector<Fig2Row> rows;
  rows.reserve(n_grid.size());
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    Vec ok;
    int failed = 0;
    for (std::size_t ei = 0; ei < seeds.size(); ++ei) {
      const double e = errors[ni * seeds.size() + ei];
      if (std::isnan(e))
        ++failed;
      else
        ok.push_back(e);
    }
    rows.push_back({n_grid[ni],
                    ok.empty() ? std::numeric_limits<double>::quiet_NaN()
                               : median(std::move(ok)),
                    failed});
  }
  return rows;
}

}  // namespace truncreg
