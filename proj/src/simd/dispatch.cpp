#include <cstdlib>
#include <string>

#include "seqgap/errors.hpp"
#include "seqgap/simd.hpp"

namespace seqgap::simd {
namespace {

Isa detect() {
  if (const char* env = std::getenv("SEQGAP_KERNELS"); env && std::string(env) == "scalar")
    return Isa::scalar;
  return cpu_supports(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa g_active = detect();
const KernelTable* g_table = &table_for(g_active);

}  // namespace

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  return isa == Isa::avx2 ? avx2::table : scalar::table;
}

Isa active_isa() { return g_active; }

void set_active_isa(Isa isa) {
  if (!cpu_supports(isa)) throw Error("kernel set not supported on this CPU: " + std::string(isa_name(isa)));
  g_active = isa;
  g_table = &table_for(isa);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace detail {
const KernelTable& active() { return *g_table; }
}  // namespace detail

}  // namespace seqgap::simd
