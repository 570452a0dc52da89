#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "seqgap/rng.hpp"

using namespace seqgap;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams replay from copies and split independently of parent position") {
  RngStream a(42);
  RngStream copy = a;
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 10; ++i) first.push_back(a.next_u64());
  for (int i = 0; i < 10; ++i) CHECK(copy.next_u64() == first[i]);

  RngStream fresh(42);
  const auto child_before = fresh.split(3).next_u64();
  for (int i = 0; i < 100; ++i) fresh.next_u64();
  CHECK(fresh.split(3).next_u64() == child_before);
  CHECK(fresh.split(4).next_u64() != child_before);
  CHECK(RngStream(43).next_u64() != RngStream(42).next_u64());
}

TEST_CASE("uniform, below and gaussian moments") {
  RngStream rng(7);
  constexpr int n = 200000;
  double su = 0, sg = 0, sg2 = 0, sg4 = 0;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    su += u;
    const double g = rng.gaussian();
    sg += g;
    sg2 += g * g;
    sg4 += g * g * g * g;
    ++counts[rng.below(7)];
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::fabs(sg / n) < 5.0 / std::sqrt(double(n)));
  CHECK(sg2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sg4 / n == doctest::Approx(3.0).epsilon(0.05));
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.46);
}

TEST_CASE("uniform_pos never returns zero and sign is balanced") {
  RngStream rng(9);
  int plus = 0;
  for (int i = 0; i < 100000; ++i) {
    CHECK(rng.uniform_pos() > 0.0);
    plus += rng.sign() > 0;
  }
  CHECK(std::abs(plus - 50000) < 1000);
}
