#include <cmath>
#include <cstdlib>
#include <string>

#include "cpdp/simd/kernels.hpp"

namespace cpdp::simd {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa))
    throw Error(Error::Kind::Config, "SIMD variant not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return detail::kAvx2Table;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return detail::kNeonTable;
#endif
    default: return detail::kScalarTable;
  }
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("CPDP_SIMD"); env != nullptr && std::string(env) == "scalar")
    return detail::kScalarTable;
  if (isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  if (isa_available(Isa::Neon)) return kernels_for(Isa::Neon);
  return detail::kScalarTable;
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Error::Kind::Dimension, "euclidean: length mismatch");
  return std::sqrt(squared_l2(a, b));
}

std::vector<double> distances_to(const Matrix& m, std::span<const double> point) {
  if (point.size() != m.cols()) throw Error(Error::Kind::Dimension, "distances_to: width mismatch");
  std::vector<double> out(m.rows());
  if (m.rows() == 0) return out;
  active_kernels().rows_squared_l2(m.row(0).data(), m.rows(), m.cols(), point.data(), out.data());
  for (auto& d : out) d = std::sqrt(d);
  return out;
}

}  // namespace cpdp::simd
