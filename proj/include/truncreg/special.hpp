#pragma once

namespace truncreg {

double norm_pdf(double z);
double norm_cdf(double z);    // Phi(z)
double norm_cdf_c(double z);  // 1 - Phi(z), via erfc (no cancellation in tails)

// Scaled complementary error function exp(x^2) * erfc(x).
// Finite all the way into the far right tail where erfc itself underflows.
double erfcx(double x);

// Phi^{-1}(p) for p in (0, 1).
double norm_quantile(double p);

// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0.
double gamma_p(double s, double x);

// Mass of the standard normal on [a, b], a < b, endpoints may be +-inf.
// Evaluated from the tail nearer to the interval so no 1 - 1 cancellation.
double normal_interval_mass(double a, double b);

}  // namespace truncreg
