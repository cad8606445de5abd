#include <atomic>
#include <cstdlib>
#include <string>

#include "attrdesc/error.hpp"
#include "kernels_internal.hpp"

namespace attrdesc::simd {
namespace {

bool cpu_has_avx2() {
#if ATTRDESC_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const KernelTable* best = available(Isa::avx2) ? kernels_for(Isa::avx2) : &scalar_kernels();
  if (const char* env = std::getenv("ATTRDESC_SIMD")) {
    const std::string_view name(env);
    if (name == "auto" || name.empty()) return best;
    auto isa = parse_isa(name);
    if (isa && available(*isa)) return kernels_for(*isa);
    // Unknown or unsupported request falls back to the reference kernels.
    return &scalar_kernels();
  }
  return best;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &detail::kScalarTable;
    case Isa::avx2:
#if ATTRDESC_HAVE_AVX2
      return cpu_has_avx2() ? &detail::kAvx2Table : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

bool available(Isa isa) { return kernels_for(isa) != nullptr; }

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select(Isa isa) {
  const KernelTable* table = kernels_for(isa);
  if (!table) throw ConfigError("SIMD variant '" + std::string(isa_name(isa)) + "' unavailable");
  slot().store(table, std::memory_order_release);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  return std::nullopt;
}

}  // namespace attrdesc::simd
