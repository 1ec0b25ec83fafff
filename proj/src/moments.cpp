#include "truncreg/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "truncreg/errors.hpp"
#include "truncreg/special.hpp"

namespace truncreg {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2OverPi = 0.7978845608028653559;
// Standardized distance beyond which the tail-scaled ratio path takes over.
constexpr double kFarTail = 6.0;

struct IntervalMoments {
  double mass;
  std::array<double, 5> m;  // standardized E[xi^p], p = 0..4
};

// phi(a)/Z and phi(b)/Z for an interval entirely in the right tail
// (a >= kFarTail), computed with the scaled complementary error function so
// the ratio stays finite where phi and the mass individually underflow.
void tail_ratios(double a, double b, double* ra, double* rb) {
  const double ea = erfcx(a / kSqrt2);
  double eb = 0.0, damp = 0.0;
  if (std::isfinite(b)) {
    damp = std::exp(-0.5 * (b - a) * (b + a));  // phi(b)/phi(a)
    eb = damp * erfcx(b / kSqrt2);
  }
  const double denom = ea - eb;
  *ra = kSqrt2OverPi / denom;
  *rb = damp * kSqrt2OverPi / denom;
}

// Moment ladder for the standard normal on [a, b] with mass Z:
// M_p = (p-1) M_{p-2} + (a^{p-1} phi(a) - b^{p-1} phi(b)) / Z.
IntervalMoments standardized_moments(double a, double b) {
  // Mirror left-tail intervals; odd moments flip sign afterwards.
  if (b <= -kFarTail) {
    IntervalMoments r = standardized_moments(-b, -a);
    r.m[1] = -r.m[1];
    r.m[3] = -r.m[3];
    return r;
  }

  IntervalMoments r;
  r.mass = normal_interval_mass(a, b);

  double ra, rb;  // phi(a)/Z, phi(b)/Z with infinite-endpoint terms zeroed
  if (a >= kFarTail) {
    tail_ratios(a, b, &ra, &rb);
  } else {
    ra = std::isfinite(a) ? norm_pdf(a) / r.mass : 0.0;
    rb = std::isfinite(b) ? norm_pdf(b) / r.mass : 0.0;
  }

  double ta[4], tb[4];  // a^p phi(a)/Z and b^p phi(b)/Z for p = 0..3
  double pa = 1.0, pb = 1.0;
  for (int p = 0; p < 4; ++p) {
    ta[p] = (ra != 0.0) ? pa * ra : 0.0;
    tb[p] = (rb != 0.0) ? pb * rb : 0.0;
    if (std::isfinite(a)) pa *= a;
    if (std::isfinite(b)) pb *= b;
  }

  r.m[0] = 1.0;
  r.m[1] = ta[0] - tb[0];
  r.m[2] = 1.0 + ta[1] - tb[1];
  r.m[3] = 2.0 * r.m[1] + ta[2] - tb[2];
  r.m[4] = 3.0 * r.m[2] + ta[3] - tb[3];
  return r;
}

}  // namespace

std::array<double, 5> truncated_power_moments(const TruncatedNormalSpec& spec) {
  if (!(spec.sigma > 0.0))
    throw std::invalid_argument("truncated moments: sigma must be > 0");
  if (!spec.set->is_interval_union())
    throw std::invalid_argument(
        "truncated moments need an interval-union set; oracle sets only "
        "support sampling");

  const double mu = spec.mean, sg = spec.sigma;
  double total_mass = 0.0;
  std::array<double, 5> acc{0.0, 0.0, 0.0, 0.0, 0.0};
  for (const auto& piece : spec.set->pieces()) {
    const IntervalMoments im =
        standardized_moments((piece.lo - mu) / sg, (piece.hi - mu) / sg);
    if (im.mass < kMassFloor) continue;
    total_mass += im.mass;
    // E[(mu + sg*xi)^p] via the binomial expansion.
    double raw[5];
    raw[0] = 1.0;
    raw[1] = mu + sg * im.m[1];
    raw[2] = mu * mu + 2.0 * mu * sg * im.m[1] + sg * sg * im.m[2];
    raw[3] = mu * mu * mu + 3.0 * mu * mu * sg * im.m[1] +
             3.0 * mu * sg * sg * im.m[2] + sg * sg * sg * im.m[3];
    raw[4] = mu * mu * mu * mu + 4.0 * mu * mu * mu * sg * im.m[1] +
             6.0 * mu * mu * sg * sg * im.m[2] +
             4.0 * mu * sg * sg * sg * im.m[3] +
             sg * sg * sg * sg * im.m[4];
    for (int p = 0; p < 5; ++p) acc[p] += im.mass * raw[p];
  }
  if (total_mass < kMassFloor)
    throw EmptyMass("truncated mass below " + std::to_string(kMassFloor));
  for (int p = 0; p < 5; ++p) acc[p] /= total_mass;
  return acc;
}

TruncatedMoments truncated_moments(const TruncatedNormalSpec& spec) {
  const auto m = truncated_power_moments(spec);
  return {m[1], m[2]};
}

double truncated_sample(const TruncatedNormalSpec& spec, Rng& rng,
                        std::size_t max_attempts, std::uint64_t* draws) {
  if (max_attempts < 1)
    throw std::invalid_argument("truncated_sample: max_attempts must be >= 1");
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const double z = spec.mean + spec.sigma * rng.normal();
    if (draws) ++*draws;
    if (spec.set->contains(z)) return z;
  }
  throw RejectionBudgetExceeded(max_attempts);
}

}  // namespace truncreg
