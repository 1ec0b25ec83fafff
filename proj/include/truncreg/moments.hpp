#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "truncreg/rng.hpp"
#include "truncreg/truncation.hpp"

namespace truncreg {

// N(mean, sigma^2) restricted to a truncation set.
struct TruncatedNormalSpec {
  double mean;
  double sigma;  // standard deviation, > 0
  const TruncationSet* set;
};

// Per-interval masses below this are treated as zero; if the whole union
// falls below it the moments are meaningless and EmptyMass is raised.
inline constexpr double kMassFloor = 1e-14;

struct TruncatedMoments {
  double m1;
  double m2;
};

// E[z] and E[z^2] in closed form from per-interval Mills-ratio identities,
// aggregated across intervals weighted by per-interval mass.
TruncatedMoments truncated_moments(const TruncatedNormalSpec& spec);

// E[z^p] for p = 0..4 (index = power); same ladder, one extra rung per order.
std::array<double, 5> truncated_power_moments(const TruncatedNormalSpec& spec);

// Exact draw from the truncated normal by rejection: z = mean + sigma * eps
// resampled until z lands in the set. Throws RejectionBudgetExceeded once
// max_attempts candidates have been rejected. Every candidate (accepted or
// not) increments *draws when given.
double truncated_sample(const TruncatedNormalSpec& spec, Rng& rng,
                        std::size_t max_attempts = 10000,
                        std::uint64_t* draws = nullptr);

}  // namespace truncreg
