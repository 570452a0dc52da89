#include <cmath>

#include "doctest.h"
#include "seqgap/parallel.hpp"
#include "seqgap/stats.hpp"

using namespace seqgap;

namespace {

// Wilson interval by inverting the score test with bisection.
Interval score_inversion(std::uint64_t x, std::uint64_t n, double z) {
  const double ph = double(x) / double(n);
  auto inside = [&](double p) { return std::fabs(ph - p) <= z * std::sqrt(p * (1 - p) / double(n)); };
  auto edge = [&](double out, double in) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (out + in);
      (inside(mid) ? in : out) = mid;
    }
    return in;
  };
  const double lo = x == 0 ? 0.0 : edge(0.0, ph);
  const double hi = x == n ? 1.0 : edge(1.0, ph);
  return {lo, hi};
}

}  // namespace

TEST_CASE("wilson interval equals score-test inversion") {
  for (auto [x, n] : {std::pair<std::uint64_t, std::uint64_t>{0, 100}, {3, 100}, {50, 100},
                      {999, 1000}, {1000, 1000}, {17, 123456}}) {
    const Interval w = wilson_interval(x, n);
    const Interval o = score_inversion(x, n, kZ99);
    CHECK(w.lower == doctest::Approx(o.lower).epsilon(1e-9));
    CHECK(w.upper == doctest::Approx(o.upper).epsilon(1e-9));
    const Interval mirror = wilson_interval(n - x, n);
    CHECK(mirror.lower == doctest::Approx(1.0 - w.upper).epsilon(1e-12));
  }
  const double z2 = kZ99 * kZ99;
  CHECK(wilson_interval(0, 100).upper == doctest::Approx((z2 / 100) / (1 + z2 / 100)));
}

TEST_CASE("mean accumulator merge equals a single pass") {
  MeanAccumulator all, left, right;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::sin(i * 0.37) * 3 + i * 0.001;
    all.add(x);
    (i < 400 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.count() == all.count());
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
  CHECK(left.max() == all.max());
  CHECK(all.halfwidth() == doctest::Approx(kZ99 * std::sqrt(all.variance() / 1000)));
}

TEST_CASE("parallel chunks reduce identically for every thread count") {
  auto run = [](unsigned threads) {
    const auto parts = parallel_chunks<double>(1000, 7, threads, [](std::size_t, std::size_t b, std::size_t e) {
      double s = 0;
      for (std::size_t i = b; i < e; ++i) s += 1.0 / double(i + 1);
      return s;
    });
    double total = 0;
    for (double p : parts) total += p;
    return total;
  };
  const double one = run(1);
  CHECK(run(3) == one);
  CHECK(run(8) == one);
  CHECK_THROWS(parallel_chunks<int>(10, 1, 2, [](std::size_t c, std::size_t, std::size_t) -> int {
    if (c == 5) throw std::runtime_error("boom");
    return 0;
  }));
}
