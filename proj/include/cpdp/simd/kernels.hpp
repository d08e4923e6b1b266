#pragma once

// Data-parallel inner loops used by the sampling and classification code.
//
// Every kernel has a scalar reference implementation; vectorized variants
// (AVX2 on x86-64, NEON on AArch64) are selected once at runtime based on
// CPU support. Setting CPDP_SIMD=scalar in the environment pins the scalar
// path. Vector variants reassociate sums, so they agree with the reference
// to rounding, not bitwise.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cpdp/common.hpp"

namespace cpdp::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*squared_l2)(const double* a, const double* b, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[r] = ||row_r(m) - point||^2 for a row-major rows x cols block.
  void (*rows_squared_l2)(const double* m, std::size_t rows, std::size_t cols, const double* point,
                          double* out);
};

/// True when the ISA was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Table for a specific ISA; throws if unavailable.
const KernelTable& kernels_for(Isa isa);

/// Table chosen at first use: best available ISA unless CPDP_SIMD=scalar.
const KernelTable& active_kernels();

namespace detail {
extern const KernelTable kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Table;
#endif
#if defined(__aarch64__)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
  return active_kernels().squared_l2(a.data(), b.data(), a.size());
}

double euclidean(std::span<const double> a, std::span<const double> b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

/// Euclidean distance from every row of `m` to `point`.
std::vector<double> distances_to(const Matrix& m, std::span<const double> point);

}  // namespace cpdp::simd
