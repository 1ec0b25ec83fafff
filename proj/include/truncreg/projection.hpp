#pragma once

#include <span>

#include "truncreg/likelihood.hpp"
#include "truncreg/mat.hpp"

namespace truncreg {

// The convex set D in (v, lambda) coordinates: a lambda-interval intersected
// with the cone ||v||^2 <= beta * lambda^2.
struct ProjectionDomain {
  double lambda_min;
  double lambda_max;
  double beta;
};

// lambda_min = a^2 / (96 sigma0^2), lambda_max = 8 (5 - 2 log a) / sigma0^2.
ProjectionDomain build_domain(double sigma0_sq, double a, double beta);

bool domain_contains(const ProjectionDomain& d, std::span<const double> v,
                     double lambda);

// Euclidean-nearest point of D, by the closed-form case table: interior
// identity, lambda clamps (with radial v-rescale at the clamped level), the
// two rim wedges given by the normal fans at (sqrt(beta) lambda, lambda) for
// lambda in {min, max}, and the generic projection onto the cone surface.
// In debug builds one call in 10^4 is cross-checked against
// project_reference.
NaturalParams project(const ProjectionDomain& d, std::span<const double> v0,
                      double lambda0);

// Brute-force nearest point: for fixed lambda the best v is the clamp of v0
// onto the radius-sqrt(beta)*lambda ball, which leaves a one-dimensional
// convex profile over lambda; dense grid plus ternary refinement. Reference
// implementation for tests and the debug cross-check.
NaturalParams project_reference(const ProjectionDomain& d,
                                std::span<const double> v0, double lambda0);

}  // namespace truncreg
