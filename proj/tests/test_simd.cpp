#include <doctest.h>

#include <cmath>
#include <vector>

#include "cpdp/simd/kernels.hpp"

using namespace cpdp;

namespace {

std::vector<simd::Isa> available_vector_isas() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::Avx2, simd::Isa::Neon})
    if (simd::isa_available(isa)) out.push_back(isa);
  return out;
}

void check_close(double got, double want) {
  CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  const auto& k = simd::kernels_for(simd::Isa::Scalar);
  const double a[] = {1, 2, 3}, b[] = {4, 6, 3};
  CHECK(k.squared_l2(a, b, 3) == 25.0);
  CHECK(k.dot(a, b, 3) == 25.0);
  CHECK(k.dot(a, b, 0) == 0.0);
  double out[2];
  const double m[] = {1, 2, 3, 4, 6, 3};
  k.rows_squared_l2(m, 2, 3, a, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 25.0);
  CHECK(simd::euclidean(a, b) == 5.0);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto& ref = simd::kernels_for(simd::Isa::Scalar);
  Rng rng(41);
  for (auto isa : available_vector_isas()) {
    CAPTURE(simd::isa_name(isa));
    const auto& k = simd::kernels_for(isa);
    CHECK(k.isa == isa);
    // Lengths cover empty input, partial lanes and multiple unrolled blocks.
    for (std::size_t n = 0; n < 70; ++n) {
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform() * 200.0 - 100.0;
        b[i] = rng.uniform() * 200.0 - 100.0;
      }
      check_close(k.squared_l2(a.data(), b.data(), n), ref.squared_l2(a.data(), b.data(), n));
      check_close(k.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n));
    }
    for (std::size_t cols : {1u, 3u, 4u, 7u, 20u}) {
      const std::size_t rows = 13;
      std::vector<double> m(rows * cols), p(cols), got(rows), want(rows);
      for (auto& x : m) x = rng.uniform();
      for (auto& x : p) x = rng.uniform();
      k.rows_squared_l2(m.data(), rows, cols, p.data(), got.data());
      ref.rows_squared_l2(m.data(), rows, cols, p.data(), want.data());
      for (std::size_t r = 0; r < rows; ++r) check_close(got[r], want[r]);
    }
  }
}

TEST_CASE("dispatch") {
  CHECK(simd::isa_available(simd::Isa::Scalar));
  const auto& active = simd::active_kernels();
  CHECK(simd::isa_available(active.isa));
  for (auto isa : {simd::Isa::Avx2, simd::Isa::Neon})
    if (!simd::isa_available(isa)) CHECK_THROWS_AS(simd::kernels_for(isa), Error);

  Matrix m(3, 2);
  m(1, 0) = 3, m(1, 1) = 4;
  m(2, 0) = 6, m(2, 1) = 8;
  const std::vector<double> origin{0, 0};
  const auto d = simd::distances_to(m, origin);
  CHECK(d == std::vector<double>{0, 5, 10});
}
