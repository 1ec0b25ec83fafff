#include "truncreg/projection.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "truncreg/errors.hpp"

namespace truncreg {

ProjectionDomain build_domain(double sigma0_sq, double a, double beta) {
  if (!(a > 0.0 && a < 1.0))
    throw InvalidSurvivalBound("survival lower bound a must lie in (0, 1)");
  if (!(sigma0_sq > 0.0))
    throw std::invalid_argument("build_domain: sigma0_sq must be > 0");
  if (!(beta > 0.0))
    throw std::invalid_argument("build_domain: beta must be > 0");
  return {a * a / (96.0 * sigma0_sq), 8.0 * (5.0 - 2.0 * std::log(a)) / sigma0_sq,
          beta};
}

bool domain_contains(const ProjectionDomain& d, std::span<const double> v,
                     double lambda) {
  if (!(lambda >= d.lambda_min && lambda <= d.lambda_max)) return false;
  return dot(v, v) <= d.beta * lambda * lambda;
}

namespace {

NaturalParams rescaled(std::span<const double> v0, double r0,
                       double target_norm, double lambda) {
  NaturalParams p;
  p.lambda = lambda;
  p.v.assign(v0.begin(), v0.end());
  // r0 = 0 leaves the radial direction undefined; the zero vector is the
  // unique nearest cone point.
  const double s = (r0 > 0.0) ? target_norm / r0 : 0.0;
  for (double& x : p.v) x *= s;
  return p;
}

NaturalParams project_cases(const ProjectionDomain& d,
                            std::span<const double> v0, double lambda0) {
  const double beta = d.beta;
  const double sb = std::sqrt(beta);
  const double r0 = norm2(v0);

  // interior
  if (lambda0 >= d.lambda_min && lambda0 <= d.lambda_max &&
      r0 * r0 <= beta * lambda0 * lambda0)
    return {Vec(v0.begin(), v0.end()), lambda0};

  if (lambda0 > d.lambda_max) {
    if (r0 <= sb * d.lambda_max)
      return {Vec(v0.begin(), v0.end()), d.lambda_max};
    return rescaled(v0, r0, sb * d.lambda_max, d.lambda_max);
  }

  // rim wedge at lambda_max (normal fan of the corner point)
  if (r0 >= sb * d.lambda_max &&
      sb * (r0 - sb * d.lambda_max) >= d.lambda_max - lambda0)
    return rescaled(v0, r0, sb * d.lambda_max, d.lambda_max);

  if (lambda0 < d.lambda_min) {
    if (r0 <= sb * d.lambda_min)
      return {Vec(v0.begin(), v0.end()), d.lambda_min};
    // rim wedge at lambda_min
    if (sb * (r0 - sb * d.lambda_min) <= d.lambda_min - lambda0)
      return rescaled(v0, r0, sb * d.lambda_min, d.lambda_min);
  }

  // generic projection onto the cone surface ||v|| = sqrt(beta) lambda
  double ls = (sb * r0 + lambda0) / (beta + 1.0);
  if (ls < d.lambda_min) ls = d.lambda_min;
  if (ls > d.lambda_max) ls = d.lambda_max;
  return rescaled(v0, r0, sb * ls, ls);
}

double distance(std::span<const double> v0, double lambda0,
                const NaturalParams& p) {
  double s = (p.lambda - lambda0) * (p.lambda - lambda0);
  for (std::size_t i = 0; i < v0.size(); ++i)
    s += (p.v[i] - v0[i]) * (p.v[i] - v0[i]);
  return std::sqrt(s);
}

}  // namespace

NaturalParams project_reference(const ProjectionDomain& d,
                                std::span<const double> v0, double lambda0) {
  const double sb = std::sqrt(d.beta);
  const double r0 = norm2(v0);

  // Squared distance after clamping the radius at a fixed lambda level.
  const auto profile = [&](double lambda) {
    const double r = std::min(r0, sb * lambda);
    return (r - r0) * (r - r0) + (lambda - lambda0) * (lambda - lambda0);
  };

  double best_l = d.lambda_min, best_f = profile(d.lambda_min);
  const int grid = 20000;
  for (int i = 1; i <= grid; ++i) {
    const double l =
        d.lambda_min + (d.lambda_max - d.lambda_min) * i / grid;
    const double f = profile(l);
    if (f < best_f) {
      best_f = f;
      best_l = l;
    }
  }
  double lo = std::max(d.lambda_min,
                       best_l - (d.lambda_max - d.lambda_min) / grid);
  double hi = std::min(d.lambda_max,
                       best_l + (d.lambda_max - d.lambda_min) / grid);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (profile(m1) < profile(m2))
      hi = m2;
    else
      lo = m1;
  }
  const double lambda = 0.5 * (lo + hi);
  return rescaled(v0, r0, std::min(r0, sb * lambda), lambda);
}

NaturalParams project(const ProjectionDomain& d, std::span<const double> v0,
                      double lambda0) {
  NaturalParams p = project_cases(d, v0, lambda0);
#ifndef NDEBUG
  // The case table is the most error-prone code here; sample-check it.
  static std::atomic<std::uint64_t> calls{0};
  if (++calls % 10000 == 0) {
    const NaturalParams ref = project_reference(d, v0, lambda0);
    if (distance(v0, lambda0, p) > distance(v0, lambda0, ref) + 1e-3)
      throw std::logic_error("project: case table disagrees with reference");
  }
#endif
  return p;
}

}  // namespace truncreg
