// Independent oracles used to freeze expected values: adaptive quadrature
// for truncated-normal moments, finite differences for gradients and
// Hessians. Nothing here touches the closed-form code paths under test.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "truncreg/dataset.hpp"
#include "truncreg/likelihood.hpp"
#include "truncreg/truncation.hpp"

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a,
                      double fa, double fm, double fb, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, flm, fm, m);
  const double right = simpson(f, m, fm, frm, fb, b);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double eps = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_step(f, a, b, fa, fm, fb, simpson(f, a, fa, fm, fb, b), eps,
                       48);
}

// E[z^p] for N(mean, sigma^2) on the interval union, by quadrature of
// z^p phi(z) over each piece clipped to +-12 sigma around the mean.
inline double moment_by_quadrature(double mean, double sigma,
                                   const truncreg::TruncationSet& set,
                                   int p) {
  const auto density = [&](double z) {
    const double u = (z - mean) / sigma;
    return std::exp(-0.5 * u * u);
  };
  double mass = 0.0, acc = 0.0;
  for (const auto& piece : set.pieces()) {
    const double lo = std::max(piece.lo, mean - 12.0 * sigma);
    const double hi = std::min(piece.hi, mean + 12.0 * sigma);
    if (!(lo < hi)) continue;
    mass += integrate(density, lo, hi);
    acc += integrate(
        [&](double z) { return std::pow(z, p) * density(z); }, lo, hi);
  }
  return acc / mass;
}

// Central difference of the per-sample nll in (v, lambda).
inline truncreg::GradientVector fd_gradient(
    const truncreg::NaturalParams& p, const truncreg::Sample& s,
    const truncreg::TruncationSet& set, double h = 1e-5) {
  truncreg::GradientVector g;
  g.dv.resize(p.v.size());
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    truncreg::NaturalParams hi = p, lo = p;
    hi.v[i] += h;
    lo.v[i] -= h;
    g.dv[i] = (truncreg::nll(hi, s, set) - truncreg::nll(lo, s, set)) /
              (2.0 * h);
  }
  truncreg::NaturalParams hi = p, lo = p;
  hi.lambda += h;
  lo.lambda -= h;
  g.dlambda =
      (truncreg::nll(hi, s, set) - truncreg::nll(lo, s, set)) / (2.0 * h);
  return g;
}

// Central-difference Jacobian of the dataset-mean exact gradient; the
// independent route to the empirical Hessian.
inline truncreg::DenseMatrix fd_hessian(const truncreg::NaturalParams& p,
                                        const truncreg::Dataset& data,
                                        const truncreg::TruncationSet& set,
                                        double h = 1e-5) {
  const int d = static_cast<int>(p.v.size()) + 1;
  truncreg::DenseMatrix out(d, d);
  const auto mean_grad_at = [&](const truncreg::NaturalParams& q) {
    truncreg::GradientVector acc{truncreg::Vec(data.k, 0.0), 0.0};
    for (std::size_t i = 0; i < data.n(); ++i) {
      const auto g = truncreg::grad_exact(q, data.sample(i), set);
      for (int a = 0; a < data.k; ++a) acc.dv[a] += g.dv[a];
      acc.dlambda += g.dlambda;
    }
    for (double& x : acc.dv) x /= static_cast<double>(data.n());
    acc.dlambda /= static_cast<double>(data.n());
    return acc;
  };
  for (int j = 0; j < d; ++j) {
    truncreg::NaturalParams hi = p, lo = p;
    if (j < d - 1) {
      hi.v[j] += h;
      lo.v[j] -= h;
    } else {
      hi.lambda += h;
      lo.lambda -= h;
    }
    const auto ghi = mean_grad_at(hi), glo = mean_grad_at(lo);
    for (int i = 0; i < d - 1; ++i)
      out(i, j) = (ghi.dv[i] - glo.dv[i]) / (2.0 * h);
    out(d - 1, j) = (ghi.dlambda - glo.dlambda) / (2.0 * h);
  }
  return out;
}

}  // namespace oracles
