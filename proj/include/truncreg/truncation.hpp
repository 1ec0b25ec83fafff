#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "truncreg/rng.hpp"

namespace truncreg {

struct Interval {
  double lo;
  double hi;
};

// The observation set S: either an ordered union of disjoint intervals
// (closed at finite endpoints) or a black-box membership oracle. Oracle
// predicates must answer deterministically for repeated queries.
class TruncationSet {
 public:
  static TruncationSet intervals(std::vector<Interval> pieces);
  static TruncationSet real_line();
  static TruncationSet oracle(std::function<bool(double)> member);

  // Grammar: intervals joined by "U"; endpoints are decimal literals,
  // "-inf" or "inf"; brackets are cosmetic. E.g. "(-inf,-1]U[1,inf)".
  static TruncationSet parse(std::string_view text);
  std::string format() const;

  bool is_interval_union() const { return !oracle_; }
  const std::vector<Interval>& pieces() const;

  bool contains(double y) const;

 private:
  TruncationSet() = default;
  std::vector<Interval> pieces_;
  std::function<bool(double)> oracle_;
};

struct Survival {
  double value = 0.0;
  double std_error = 0.0;  // 0 for the exact interval-union evaluation
};

// Probability that N(mean, sigma^2) lands in S. Exact CDF sums for interval
// unions; a Monte-Carlo fraction with attached standard error for oracles.
Survival survival_probability(double mean, double sigma,
                              const TruncationSet& set, std::size_t mc_budget,
                              Rng& rng);
Survival survival_probability(double mean, double sigma,
                              const TruncationSet& set,
                              std::size_t mc_budget = 10000);

}  // namespace truncreg
