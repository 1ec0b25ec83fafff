#include "truncreg/likelihood.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <vector>

#include "truncreg/errors.hpp"
#include "truncreg/special.hpp"

namespace truncreg {

namespace {
constexpr double kTwoPi = 6.2831853071795864769;
// Block size for the deterministic parallel reductions.
constexpr std::size_t kBlock = 256;

void require_intervals(const TruncationSet& set, const char* who) {
  if (!set.is_interval_union())
    throw std::invalid_argument(std::string(who) +
                                ": needs an interval-union set; oracle sets "
                                "only support the sampling path");
}
}  // namespace

NaturalParams to_natural(const ModelParams& p) {
  if (!(p.sigma_sq > 0.0))
    throw std::invalid_argument("to_natural: sigma_sq must be > 0");
  NaturalParams out;
  out.lambda = 1.0 / p.sigma_sq;
  out.v.resize(p.w.size());
  for (std::size_t i = 0; i < p.w.size(); ++i) out.v[i] = p.w[i] / p.sigma_sq;
  return out;
}

ModelParams to_model(const NaturalParams& p) {
  if (!(p.lambda > 0.0))
    throw std::invalid_argument("to_model: lambda must be > 0");
  ModelParams out;
  out.sigma_sq = 1.0 / p.lambda;
  out.w.resize(p.v.size());
  for (std::size_t i = 0; i < p.v.size(); ++i) out.w[i] = p.v[i] / p.lambda;
  return out;
}

double nll(const NaturalParams& p, const Sample& s, const TruncationSet& set) {
  require_intervals(set, "nll");
  const double vx = dot(p.v, s.x);
  const double loc = vx / p.lambda;
  const double sd = 1.0 / std::sqrt(p.lambda);
  const double alpha = survival_probability(loc, sd, set).value;
  if (alpha < kMassFloor)
    throw EmptyMass("nll: truncated mass below floor at this sample");
  // Completing the square inside the log-partition:
  // log Int_S exp(-(lambda z^2 - 2 z vx)/2) dz
  //   = vx^2/(2 lambda) + log(2 pi / lambda)/2 + log alpha(loc, sd, S).
  return 0.5 * (p.lambda * s.y * s.y - 2.0 * s.y * vx) +
         0.5 * std::log(kTwoPi / p.lambda) + vx * vx / (2.0 * p.lambda) +
         std::log(alpha);
}

namespace {

TruncatedNormalSpec response_spec(const NaturalParams& p, const Sample& s,
                                  const TruncationSet& set) {
  const double vx = dot(p.v, s.x);
  return {vx / p.lambda, 1.0 / std::sqrt(p.lambda), &set};
}

GradientVector gradient_from_moments(const Sample& s, double m1, double m2) {
  GradientVector g;
  g.dv.resize(s.x.size());
  const double diff = m1 - s.y;
  for (std::size_t i = 0; i < s.x.size(); ++i) g.dv[i] = diff * s.x[i];
  g.dlambda = 0.5 * (s.y * s.y - m2);
  return g;
}

}  // namespace

GradientVector grad_exact(const NaturalParams& p, const Sample& s,
                          const TruncationSet& set) {
  require_intervals(set, "grad_exact");
  const auto m = truncated_moments(response_spec(p, s, set));
  return gradient_from_moments(s, m.m1, m.m2);
}

GradientVector grad_stochastic(const NaturalParams& p, const Sample& s,
                               const TruncationSet& set, Rng& rng, int batch,
                               std::size_t max_attempts,
                               std::uint64_t* draws) {
  if (batch < 1)
    throw std::invalid_argument("grad_stochastic: batch must be >= 1");
  const auto spec = response_spec(p, s, set);
  double sum_z = 0.0, sum_z2 = 0.0;
  for (int b = 0; b < batch; ++b) {
    const double z = truncated_sample(spec, rng, max_attempts, draws);
    sum_z += z;
    sum_z2 += z * z;
  }
  return gradient_from_moments(s, sum_z / batch, sum_z2 / batch);
}

namespace {

// Per-sample contributions shared by the serial and blocked kernels.

void add_hessian(const NaturalParams& p, const Sample& s,
                 const TruncationSet& set, DenseMatrix& acc) {
  const auto m = truncated_power_moments(response_spec(p, s, set));
  const double var_z = m[2] - m[1] * m[1];
  const double cov_half = 0.5 * (m[3] - m[1] * m[2]);
  const double var_half = 0.25 * (m[4] - m[2] * m[2]);
  const int k = static_cast<int>(s.x.size());
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) acc(a, b) += var_z * s.x[a] * s.x[b];
    acc(a, k) -= cov_half * s.x[a];
  }
  acc(k, k) += var_half;
}

void add_gamma(const NaturalParams& p, const Sample& s,
               const TruncationSet& set, DenseMatrix& acc) {
  const GradientVector g = grad_exact(p, s, set);
  const int k = static_cast<int>(g.dv.size());
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) acc(a, b) += g.dv[a] * g.dv[b];
    acc(a, k) += g.dv[a] * g.dlambda;
  }
  acc(k, k) += g.dlambda * g.dlambda;
}

void finish_symmetric(DenseMatrix& acc, double inv_n) {
  for (double& x : acc.a) x *= inv_n;
  for (int a = 0; a < acc.rows; ++a)
    for (int b = 0; b < a; ++b) acc(a, b) = acc(b, a);
}

// Runs fn(i, slot) for each sample, blocked 256 at a time. Blocks execute in
// parallel; per-block results merge serially in block order, so the output
// is identical for any thread count. Exceptions are captured per block and
// the earliest one rethrown.
template <typename Slot, typename Body, typename Merge>
void blocked_reduce(std::size_t n, Slot make_slot, Body body, Merge merge) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<decltype(make_slot())> slots(nb, make_slot());
  std::vector<std::exception_ptr> errs(nb);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < static_cast<long long>(nb); ++b) {
    try {
      const std::size_t begin = b * kBlock;
      const std::size_t end = std::min(begin + kBlock, n);
      for (std::size_t i = begin; i < end; ++i) body(i, slots[b]);
    } catch (...) {
      errs[b] = std::current_exception();
    }
  }
  for (std::size_t b = 0; b < nb; ++b)
    if (errs[b]) std::rethrow_exception(errs[b]);
  for (std::size_t b = 0; b < nb; ++b) merge(slots[b]);
}

void require_nonempty(const Dataset& data, const char* who) {
  if (data.n() == 0)
    throw std::invalid_argument(std::string(who) + ": empty dataset");
}

}  // namespace

double nll_mean(const NaturalParams& p, const Dataset& data,
                const TruncationSet& set) {
  require_intervals(set, "nll_mean");
  require_nonempty(data, "nll_mean");
  double total = 0.0;
  blocked_reduce(
      data.n(), [] { return 0.0; },
      [&](std::size_t i, double& acc) { acc += nll(p, data.sample(i), set); },
      [&](double& acc) { total += acc; });
  return total / static_cast<double>(data.n());
}

GradientVector mean_gradient(const NaturalParams& p, const Dataset& data,
                             const TruncationSet& set) {
  require_intervals(set, "mean_gradient");
  require_nonempty(data, "mean_gradient");
  GradientVector total{Vec(data.k, 0.0), 0.0};
  blocked_reduce(
      data.n(), [&] { return GradientVector{Vec(data.k, 0.0), 0.0}; },
      [&](std::size_t i, GradientVector& acc) {
        const GradientVector g = grad_exact(p, data.sample(i), set);
        for (int a = 0; a < data.k; ++a) acc.dv[a] += g.dv[a];
        acc.dlambda += g.dlambda;
      },
      [&](GradientVector& acc) {
        for (int a = 0; a < data.k; ++a) total.dv[a] += acc.dv[a];
        total.dlambda += acc.dlambda;
      });
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (double& x : total.dv) x *= inv_n;
  total.dlambda *= inv_n;
  return total;
}

DenseMatrix empirical_hessian(const NaturalParams& p, const Dataset& data,
                              const TruncationSet& set) {
  require_intervals(set, "empirical_hessian");
  require_nonempty(data, "empirical_hessian");
  const int d = data.k + 1;
  DenseMatrix total(d, d);
  blocked_reduce(
      data.n(), [&] { return DenseMatrix(d, d); },
      [&](std::size_t i, DenseMatrix& acc) {
        add_hessian(p, data.sample(i), set, acc);
      },
      [&](DenseMatrix& acc) {
        for (std::size_t t = 0; t < total.a.size(); ++t)
          total.a[t] += acc.a[t];
      });
  finish_symmetric(total, 1.0 / static_cast<double>(data.n()));
  return total;
}

DenseMatrix gamma_matrix(const NaturalParams& p, const Dataset& data,
                         const TruncationSet& set) {
  require_intervals(set, "gamma_matrix");
  require_nonempty(data, "gamma_matrix");
  const int d = data.k + 1;
  DenseMatrix total(d, d);
  blocked_reduce(
      data.n(), [&] { return DenseMatrix(d, d); },
      [&](std::size_t i, DenseMatrix& acc) {
        add_gamma(p, data.sample(i), set, acc);
      },
      [&](DenseMatrix& acc) {
        for (std::size_t t = 0; t < total.a.size(); ++t)
          total.a[t] += acc.a[t];
      });
  finish_symmetric(total, 1.0 / static_cast<double>(data.n()));
  return total;
}

namespace serial {

double nll_mean(const NaturalParams& p, const Dataset& data,
                const TruncationSet& set) {
  require_nonempty(data, "serial::nll_mean");
  double acc = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i)
    acc += truncreg::nll(p, data.sample(i), set);
  return acc / static_cast<double>(data.n());
}

GradientVector mean_gradient(const NaturalParams& p, const Dataset& data,
                             const TruncationSet& set) {
  require_nonempty(data, "serial::mean_gradient");
  GradientVector total{Vec(data.k, 0.0), 0.0};
  for (std::size_t i = 0; i < data.n(); ++i) {
    const GradientVector g = grad_exact(p, data.sample(i), set);
    for (int a = 0; a < data.k; ++a) total.dv[a] += g.dv[a];
    total.dlambda += g.dlambda;
  }
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (double& x : total.dv) x *= inv_n;
  total.dlambda *= inv_n;
  return total;
}

DenseMatrix empirical_hessian(const NaturalParams& p, const Dataset& data,
                              const TruncationSet& set) {
  require_nonempty(data, "serial::empirical_hessian");
  const int d = data.k + 1;
  DenseMatrix total(d, d);
  for (std::size_t i = 0; i < data.n(); ++i)
    add_hessian(p, data.sample(i), set, total);
  finish_symmetric(total, 1.0 / static_cast<double>(data.n()));
  return total;
}

DenseMatrix gamma_matrix(const NaturalParams& p, const Dataset& data,
                         const TruncationSet& set) {
  require_nonempty(data, "serial::gamma_matrix");
  const int d = data.k + 1;
  DenseMatrix total(d, d);
  for (std::size_t i = 0; i < data.n(); ++i)
    add_gamma(p, data.sample(i), set, total);
  finish_symmetric(total, 1.0 / static_cast<double>(data.n()));
  return total;
}

}  // namespace serial

}  // namespace truncreg
