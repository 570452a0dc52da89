#pragma once

// Data-parallel inner loops used across the library.
//
// Every kernel has a scalar reference implementation and an AVX2/FMA variant.
// The variant is picked once at startup from CPUID; SEQGAP_KERNELS=scalar in
// the environment forces the reference path. Reductions in the AVX2 path use a
// different summation order than the scalar path, so results agree to a few
// ulps rather than bit-for-bit; max-type kernels agree exactly.

#include <cstddef>
#include <span>
#include <string_view>

namespace seqgap::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum_abs)(const double* x, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // sum_i exp(x_i - shift) for shift >= max_i x_i; terms below exp(-708)
  // contribute 0, so -inf entries are allowed.
  double (*sum_exp_shifted)(const double* x, std::size_t n, double shift);
};

namespace scalar {
extern const KernelTable table;
}
namespace avx2 {
// Only valid to call when cpu_supports(Isa::avx2).
extern const KernelTable table;
}

bool cpu_supports(Isa isa);
const KernelTable& table_for(Isa isa);

// Active dispatch target.
Isa active_isa();
// Override the dispatch target (tests, benchmarks). Throws if unsupported.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);

namespace detail {
const KernelTable& active();
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return detail::active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  detail::active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum_abs(std::span<const double> x) {
  return detail::active().sum_abs(x.data(), x.size());
}
inline double sum_sq(std::span<const double> x) {
  return detail::active().sum_sq(x.data(), x.size());
}
inline double max_abs(std::span<const double> x) {
  return detail::active().max_abs(x.data(), x.size());
}
inline double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  return detail::active().sum_abs_diff(a.data(), b.data(), a.size());
}
inline double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return detail::active().sum_sq_diff(a.data(), b.data(), a.size());
}
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return detail::active().max_abs_diff(a.data(), b.data(), a.size());
}
inline double sum_exp_shifted(std::span<const double> x, double shift) {
  return detail::active().sum_exp_shifted(x.data(), x.size(), shift);
}

}  // namespace seqgap::simd
