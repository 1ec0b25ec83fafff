// Command-line front end: dataset generation, fitting, confidence regions,
// and the experiment grids. JSON for single results, CSV for tables.
//
// Exit codes: 0 success, 2 usage, 3 data/degeneracy, 4 sampling budget,
// 5 inference precondition.

#include <charconv>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "truncreg/dataset_io.hpp"
#include "truncreg/errors.hpp"
#include "truncreg/estimator.hpp"
#include "truncreg/inference.hpp"
#include "truncreg/synth.hpp"

using nlohmann::json;
using namespace truncreg;

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(',', pos);
    const std::string tok = text.substr(
        pos, next == std::string::npos ? std::string::npos : next - pos);
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw CLI::ValidationError("bad number in list: '" + tok + "'");
    out.push_back(v);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

struct CommonFitFlags {
  std::string data_path;
  std::string set_text;
  double a = 0.1;
  double beta = 16.0;
  std::string schedule = "sqrt";
  double c = 0.1;
  double zeta = 0.0;  // 0 -> auto for the strong schedule
  double lr0 = 0.1;
  double decay_factor = 0.9;
  int decay_every = 100;
  int steps = 0;  // 0 -> default per command
  int batch = 10;
  int max_attempts = 10000;
  std::uint64_t seed = 1;
  int boost_runs = 0;
  double boost_eps = 0.1;
};

void add_fit_flags(CLI::App* cmd, CommonFitFlags& f, bool lock_strong) {
  cmd->add_option("--data", f.data_path, "input CSV (header x1,...,xk,y)")
      ->required();
  cmd->add_option("--set", f.set_text,
                  "truncation set, e.g. \"[0,inf)\" or \"(-inf,-1]U[1,inf)\"")
      ->required();
  cmd->add_option("--a", f.a, "survival probability lower bound in (0,1)");
  cmd->add_option("--beta", f.beta, "bound on ||w||^2");
  if (!lock_strong)
    cmd->add_option("--schedule", f.schedule, "sqrt | strong | step")
        ->check(CLI::IsMember({"sqrt", "strong", "step"}));
  cmd->add_option("--c", f.c, "sqrt schedule constant (eta_t = c/sqrt(t))");
  cmd->add_option("--zeta", f.zeta,
                  "strong-convexity constant; omit for the plug-in value");
  cmd->add_option("--lr0", f.lr0, "step schedule initial rate");
  cmd->add_option("--decay-factor", f.decay_factor, "step schedule factor");
  cmd->add_option("--decay-every", f.decay_every, "step schedule period")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--steps", f.steps, "PSGD steps (default: command-specific)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--batch", f.batch, "rejection draws per gradient step")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-attempts", f.max_attempts,
                  "rejection attempts per draw")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--boost", f.boost_runs,
                  "majority-vote boosting over this many independent runs")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--boost-eps", f.boost_eps, "closeness radius for boosting");
}

FitConfig make_fit_config(const CommonFitFlags& f, int default_steps,
                          bool force_strong) {
  FitConfig cfg;
  std::string schedule = force_strong ? "strong" : f.schedule;
  if (schedule == "sqrt")
    cfg.schedule = SqrtDecay{f.c};
  else if (schedule == "strong")
    cfg.schedule = StronglyConvex{f.zeta};
  else
    cfg.schedule = StepDecay{f.lr0, f.decay_factor, f.decay_every};
  cfg.steps = f.steps > 0 ? f.steps : default_steps;
  cfg.batch = f.batch;
  cfg.max_attempts = static_cast<std::size_t>(f.max_attempts);
  cfg.survival_bound_a = f.a;
  cfg.beta = f.beta;
  cfg.seed = f.seed;
  return cfg;
}

json fit_report(const FitResult& r, const FitConfig& cfg,
                const CommonFitFlags& f) {
  json cfg_echo{{"schedule", f.schedule},
                {"steps", cfg.steps},
                {"batch", cfg.batch},
                {"max_attempts", cfg.max_attempts},
                {"a", cfg.survival_bound_a},
                {"beta", cfg.beta},
                {"seed", cfg.seed},
                {"set", f.set_text},
                {"boost", f.boost_runs}};
  if (f.schedule == "sqrt") cfg_echo["c"] = f.c;
  if (f.schedule == "step") {
    cfg_echo["lr0"] = f.lr0;
    cfg_echo["decay_factor"] = f.decay_factor;
    cfg_echo["decay_every"] = f.decay_every;
  }
  return json{
      {"w", r.params.w},
      {"sigma2", r.params.sigma_sq},
      {"zeta", r.zeta_used},
      {"domain",
       {{"lambda_min", r.domain.lambda_min},
        {"lambda_max", r.domain.lambda_max},
        {"beta", r.domain.beta}}},
      {"diagnostics",
       {{"final_grad_norm", r.diagnostics.final_grad_norm},
        {"projections_applied", r.diagnostics.projections_applied},
        {"rejection_draws_total", r.diagnostics.rejection_draws_total},
        {"steps_run", r.diagnostics.steps_run},
        {"no_majority", r.diagnostics.no_majority}}},
      {"config_echo", cfg_echo}};
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file_atomic(out_path, text);
}

json matrix_json(const DenseMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

int run_generate(const std::string& out_path, int k, int n, double sigma2,
                 const std::string& wstar, const std::string& xdist,
                 const std::string& set_text, std::uint64_t seed) {
  GenConfig cfg;
  cfg.k = k;
  cfg.n_observed = n;
  cfg.sigma_star_sq = sigma2;
  cfg.set = TruncationSet::parse(set_text);
  cfg.seed = seed;

  if (wstar == "ones")
    cfg.w_star = WStarOnes{};
  else if (wstar == "uniform")
    cfg.w_star = WStarUniformPm1{};
  else {
    WStarExplicit e{parse_double_list(wstar)};
    if (static_cast<int>(e.w.size()) != k)
      throw CLI::ValidationError("--wstar list must have k entries");
    cfg.w_star = e;
  }

  if (xdist == "normal")
    cfg.x_dist = StandardNormalX{};
  else if (xdist == "normalized")
    cfg.x_dist = NormalizedStandardNormalX{};
  else if (xdist.rfind("uniform:", 0) == 0) {
    const auto bounds = parse_double_list(xdist.substr(8));
    if (bounds.size() != 2 || !(bounds[0] < bounds[1]))
      throw CLI::ValidationError("--xdist uniform:LO:HI needs LO < HI");
    cfg.x_dist = UniformBox{bounds[0], bounds[1]};
  } else {
    throw CLI::ValidationError(
        "--xdist must be normal | normalized | uniform:LO:HI");
  }

  const GeneratedData gen = generate(cfg);
  std::ostringstream csv;
  write_csv(csv, gen.dataset);
  emit(out_path, csv.str());
  std::fprintf(stderr, "acceptance_rate=%s world_draws=%ld\n",
               format_double(gen.acceptance_rate).c_str(), gen.world_draws);
  return 0;
}

int run_fit(const CommonFitFlags& f, const std::string& out_path) {
  const Dataset data = load_csv_file(f.data_path);
  const TruncationSet set = TruncationSet::parse(f.set_text);
  const FitConfig cfg = make_fit_config(f, 2500, false);
  const FitResult r = f.boost_runs > 0
                          ? boost(data, set, cfg, f.boost_runs, f.boost_eps)
                          : fit(data, set, cfg);
  emit(out_path, fit_report(r, cfg, f).dump(2) + "\n");
  return 0;
}

int run_confidence(const CommonFitFlags& f, const std::string& out_path,
                   double alpha, const std::string& test_point,
                   bool main_text_shape) {
  const Dataset data = load_csv_file(f.data_path);
  const TruncationSet set = TruncationSet::parse(f.set_text);
  const FitConfig cfg = make_fit_config(
      f, psgd_part_size(static_cast<int>(data.n())), /*force_strong=*/true);

  const ThreeSplit parts = split_three(data);
  const FitResult r = fit(data, set, cfg);
  const AsymptoticCovariance cov = asymptotic_covariance(r, parts.part3, set);
  const long n = r.diagnostics.steps_run;
  const ConfidenceRegion region =
      confidence_region(cov, n, alpha, main_text_shape);

  json out{{"center", {{"w", region.center.w},
                       {"sigma2", region.center.sigma_sq}}},
           {"shape", matrix_json(region.shape)},
           {"radius", region.radius},
           {"alpha", alpha},
           {"zeta", cov.zeta},
           {"n", n},
           {"df", cov.k + 1}};
  if (!test_point.empty()) {
    const auto values = parse_double_list(test_point);
    if (static_cast<int>(values.size()) != data.k + 1)
      throw CLI::ValidationError("--test needs k weights plus sigma2");
    ModelParams candidate;
    candidate.w.assign(values.begin(), values.end() - 1);
    candidate.sigma_sq = values.back();
    const bool inside = region_contains(region, candidate);
    out["contains"] = inside;
    std::fprintf(stderr, "contains: %s\n", inside ? "true" : "false");
  }
  emit(out_path, out.dump(2) + "\n");
  return 0;
}

int run_experiment(const std::string& which, const std::string& out_path,
                   const CommonFitFlags& f, int k, int n, double sigma2,
                   const std::string& wstar, const std::string& xdist,
                   const std::string& sigma_grid_text,
                   const std::string& n_grid_text,
                   const std::string& seeds_text, int jobs) {
  GenConfig base;
  base.k = k;
  base.n_observed = n;
  base.sigma_star_sq = sigma2;
  base.set = TruncationSet::parse(f.set_text);
  base.seed = f.seed;
  if (wstar == "ones")
    base.w_star = WStarOnes{};
  else if (wstar == "uniform")
    base.w_star = WStarUniformPm1{};
  else
    base.w_star = WStarExplicit{parse_double_list(wstar)};
  if (xdist == "normal")
    base.x_dist = StandardNormalX{};
  else if (xdist == "normalized")
    base.x_dist = NormalizedStandardNormalX{};
  else if (xdist.rfind("uniform:", 0) == 0) {
    const auto bounds = parse_double_list(xdist.substr(8));
    if (bounds.size() != 2 || !(bounds[0] < bounds[1]))
      throw CLI::ValidationError("--xdist uniform:LO:HI needs LO < HI");
    base.x_dist = UniformBox{bounds[0], bounds[1]};
  } else {
    throw CLI::ValidationError(
        "--xdist must be normal | normalized | uniform:LO:HI");
  }

  std::vector<std::uint64_t> seeds;
  for (double s : parse_double_list(seeds_text))
    seeds.push_back(static_cast<std::uint64_t>(s));

  const FitConfig fit_cfg = make_fit_config(f, 2500, false);
  std::ostringstream csv;
  if (which == "fig1") {
    const auto rows = experiment_fig1(seeds, parse_double_list(sigma_grid_text),
                                      base, fit_cfg, jobs);
    csv << "sigma2_true,method,w_err,sigma2_err,seed,failed\n";
    for (const auto& r : rows)
      csv << format_double(r.sigma2_true) << "," << r.method << ","
          << format_double(r.w_err) << "," << format_double(r.sigma2_err)
          << "," << r.seed << "," << (r.failed ? 1 : 0) << "\n";
  } else {
    std::vector<int> n_grid;
    for (double v : parse_double_list(n_grid_text))
      n_grid.push_back(static_cast<int>(v));
    const auto rows = experiment_fig2(n_grid, base, fit_cfg, seeds, jobs);
    csv << "n,median_total_error,failed_trials\n";
    for (const auto& r : rows)
      csv << r.n << "," << format_double(r.median_total_error) << ","
          << r.failed_trials << "\n";
  }
  emit(out_path, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncated linear regression with unknown noise variance"};
  app.require_subcommand(1);

  // generate
  auto* gen_cmd = app.add_subcommand(
      "generate", "sample a truncated-regression dataset to CSV");
  int gen_k = 10, gen_n = 1000;
  double gen_sigma2 = 1.0;
  std::string gen_wstar = "uniform", gen_xdist = "uniform:-5:5";
  std::string gen_set, gen_out;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--k", gen_k, "feature dimension")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen_n, "observed pairs to collect")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--sigma2", gen_sigma2, "true noise variance")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--wstar", gen_wstar, "ones | uniform | w1,...,wk");
  gen_cmd->add_option("--xdist", gen_xdist,
                      "normal | normalized | uniform:LO:HI");
  gen_cmd->add_option("--set", gen_set, "truncation set grammar")->required();
  gen_cmd->add_option("--seed", gen_seed, "RNG seed");
  gen_cmd->add_option("--out", gen_out, "output path (default stdout)");

  // fit
  auto* fit_cmd =
      app.add_subcommand("fit", "estimate (w, sigma^2) by projected SGD");
  CommonFitFlags fit_flags;
  std::string fit_out;
  add_fit_flags(fit_cmd, fit_flags, /*lock_strong=*/false);
  fit_cmd->add_option("--out", fit_out, "output path (default stdout)");

  // confidence
  auto* conf_cmd = app.add_subcommand(
      "confidence", "fit plus an asymptotic confidence region");
  CommonFitFlags conf_flags;
  std::string conf_out, conf_test;
  double conf_alpha = 0.05;
  bool conf_main_text = false;
  add_fit_flags(conf_cmd, conf_flags, /*lock_strong=*/true);
  conf_cmd->add_option("--alpha", conf_alpha, "miscoverage level in (0,1)");
  conf_cmd->add_option("--test", conf_test,
                       "candidate \"w1,...,wk,sigma2\" to test");
  conf_cmd->add_flag("--main-text-shape", conf_main_text,
                     "use R^T Sigma R instead of R^T Sigma^{-1} R");
  conf_cmd->add_option("--out", conf_out, "output path (default stdout)");

  // experiment
  auto* exp_cmd =
      app.add_subcommand("experiment", "run an experiment grid to CSV");
  CommonFitFlags exp_flags;
  std::string exp_which, exp_out;
  std::string exp_wstar = "uniform", exp_xdist = "uniform:-5:5";
  std::string exp_sigma_grid = "1,4,9";
  std::string exp_n_grid = "250,500,1000,2000,4000";
  std::string exp_seeds = "1,2,3,4,5,6,7,8,9,10";
  int exp_k = 10, exp_n = 10000, exp_jobs = 0;
  double exp_sigma2 = 1.0;
  exp_cmd->add_option("--which", exp_which, "fig1 | fig2")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2"}));
  exp_cmd->add_option("--k", exp_k, "feature dimension")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--n", exp_n, "observed pairs per cell (fig1)")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--sigma2", exp_sigma2, "noise variance (fig2)");
  exp_cmd->add_option("--wstar", exp_wstar, "ones | uniform | w1,...,wk");
  exp_cmd->add_option("--xdist", exp_xdist,
                      "normal | normalized | uniform:LO:HI");
  exp_cmd->add_option("--set", exp_flags.set_text, "truncation set grammar")
      ->required();
  exp_cmd->add_option("--sigma-grid", exp_sigma_grid, "fig1 sigma^2 grid");
  exp_cmd->add_option("--n-grid", exp_n_grid, "fig2 sample-count grid");
  exp_cmd->add_option("--seeds", exp_seeds, "comma-separated seed list");
  exp_cmd->add_option("--seed", exp_flags.seed, "base seed for fits");
  exp_cmd->add_option("--schedule", exp_flags.schedule, "sqrt | strong | step")
      ->check(CLI::IsMember({"sqrt", "strong", "step"}));
  exp_cmd->add_option("--steps", exp_flags.steps, "PSGD steps per fit")
      ->check(CLI::NonNegativeNumber);
  exp_cmd->add_option("--batch", exp_flags.batch, "draws per gradient step")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--a", exp_flags.a, "survival lower bound");
  exp_cmd->add_option("--beta", exp_flags.beta, "bound on ||w||^2");
  exp_cmd->add_option("--lr0", exp_flags.lr0, "step schedule initial rate");
  exp_cmd->add_option("--decay-factor", exp_flags.decay_factor,
                      "step schedule factor");
  exp_cmd->add_option("--decay-every", exp_flags.decay_every,
                      "step schedule period");
  exp_cmd->add_option("--c", exp_flags.c, "sqrt schedule constant");
  exp_cmd->add_option("--jobs", exp_jobs, "parallel grid cells (0 = auto)")
      ->check(CLI::NonNegativeNumber);
  exp_cmd->add_option("--out", exp_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
    if (gen_cmd->parsed())
      return run_generate(gen_out, gen_k, gen_n, gen_sigma2, gen_wstar,
                          gen_xdist, gen_set, gen_seed);
    if (fit_cmd->parsed()) return run_fit(fit_flags, fit_out);
    if (conf_cmd->parsed())
      return run_confidence(conf_flags, conf_out, conf_alpha, conf_test,
                            conf_main_text);
    if (exp_cmd->parsed())
      return run_experiment(exp_which, exp_out, exp_flags, exp_k, exp_n,
                            exp_sigma2, exp_wstar, exp_xdist, exp_sigma_grid,
                            exp_n_grid, exp_seeds, exp_jobs);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const GrammarError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RejectionBudgetExceeded& e) {
    std::cerr << "error (sampling budget): " << e.what() << "\n";
    return 4;
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "error (inference precondition): " << e.what() << "\n";
    return 5;
  } catch (const SingularSigma& e) {
    std::cerr << "error (inference precondition): " << e.what() << "\n";
    return 5;
  } catch (const Error& e) {
    std::cerr << "error (data): " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
