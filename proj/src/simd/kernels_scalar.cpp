#include "cpdp/simd/kernels.hpp"

namespace cpdp::simd {
namespace {

double squared_l2_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void rows_squared_l2_scalar(const double* m, std::size_t rows, std::size_t cols,
                            const double* point, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = squared_l2_scalar(m + r * cols, point, cols);
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::Scalar, &squared_l2_scalar, &dot_scalar,
                               &rows_squared_l2_scalar};
}

}  // namespace cpdp::simd
