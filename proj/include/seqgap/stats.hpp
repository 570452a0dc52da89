#pragma once

#include <cstdint>

namespace seqgap {

// Two-sided 99% standard normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double halfwidth() const { return 0.5 * (upper - lower); }
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ99);

struct ProportionEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  double estimate() const;
  Interval interval(double z = kZ99) const;
  double halfwidth(double z = kZ99) const { return interval(z).halfwidth(); }
  void merge(const ProportionEstimate& other) {
    successes += other.successes;
    trials += other.trials;
  }
};

// Running mean/variance with a deterministic merge (Chan et al.).
class MeanAccumulator {
 public:
  void add(double x);
  void merge(const MeanAccumulator& other);

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased sample variance
  double standard_error() const;
  // z * standard error; the normal-approximation confidence half-width.
  double halfwidth(double z = kZ99) const { return z * standard_error(); }
  double max() const { return max_; }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double max_ = 0.0;
};

}  // namespace seqgap
