#pragma once

// Runtime-dispatched numeric kernels. Every kernel has a scalar reference
// implementation; the AVX2+FMA variant is compiled in a separate translation
// unit and selected at startup when the CPU supports it. Within one variant,
// reduction order is fixed, so results are deterministic for a given input.

#include <cstddef>
#include <optional>
#include <string_view>

namespace attrdesc::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  // c[m x n] = a[m x k] * b[k x n], all row-major.
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
  // c[m x n] = a[m x k] * b[n x k]^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
  // out[d] = column sums of x[n x d]
  void (*column_sums)(const double* x, std::size_t n, std::size_t d, double* out);
  // g[d x d] = sum_r (x_r - mean)(x_r - mean)^T; g is overwritten and exactly symmetric.
  void (*centered_gram)(const double* x, std::size_t n, std::size_t d, const double* mean,
                        double* g);
};

const KernelTable& scalar_kernels();
/// Null when the variant was not compiled in or the CPU lacks the instructions.
const KernelTable* kernels_for(Isa isa);
bool available(Isa isa);

/// Active table. Chosen once from the CPU features; ATTRDESC_SIMD=scalar|avx2|auto overrides.
const KernelTable& active();
/// Forces a variant for the rest of the process. Throws if it is unavailable.
void select(Isa isa);

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

}  // namespace attrdesc::simd
