#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "robinsdp/errors.hpp"
#include "robinsdp/kernels.hpp"

using namespace robinsdp;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels on small inputs") {
  const auto& t = kernels::scalar_table();
  const double x[3] = {1.0, 2.0, 3.0};
  double y[3] = {4.0, 5.0, 6.0};
  CHECK(t.dot(x, y, 3) == 32.0);
  t.axpy(2.0, x, y, 3);
  CHECK(y[0] == 6.0);
  CHECK(y[2] == 12.0);
  double p[1] = {1.0};
  double q[1] = {0.0};
  t.rotate(0.0, 1.0, p, q, 1);  // quarter turn
  CHECK(p[0] == 0.0);
  CHECK(q[0] == 1.0);
  CHECK(t.dot(x, x, 0) == 0.0);
}

TEST_CASE("avx2 kernels match the scalar reference on every tail length") {
  const kernels::KernelTable* fast = kernels::avx2_table();
  if (fast == nullptr || !kernels::cpu_supports_avx2()) {
    MESSAGE("avx2 kernels unavailable on this machine");
    return;
  }
  const auto& ref = kernels::scalar_table();
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 100u, 1023u}) {
    CAPTURE(n);
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
    CHECK(std::abs(fast->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= 1e-14 * (scale + 1.0));

    auto y1 = y;
    auto y2 = y;
    fast->axpy(-0.75, x.data(), y1.data(), n);
    ref.axpy(-0.75, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

    auto a1 = x, b1 = y, a2 = x, b2 = y;
    const double c = std::cos(0.3), s = std::sin(0.3);
    fast->rotate(c, s, a1.data(), b1.data(), n);
    ref.rotate(c, s, a2.data(), b2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(a1[i] - a2[i]) <= 1e-15);
      CHECK(std::abs(b1[i] - b2[i]) <= 1e-15);
    }
  }
}

TEST_CASE("runtime selection") {
  const kernels::Isa before = kernels::active().isa;
  kernels::select(kernels::Isa::scalar);
  CHECK(kernels::active().isa == kernels::Isa::scalar);
  CHECK(kernels::isa_name(kernels::Isa::scalar) == "scalar");
  if (kernels::avx2_table() != nullptr && kernels::cpu_supports_avx2()) {
    kernels::select(kernels::Isa::avx2);
    CHECK(kernels::active().isa == kernels::Isa::avx2);
  } else {
    CHECK_THROWS_AS(kernels::select(kernels::Isa::avx2), ValidationError);
  }
  kernels::select(before);
}

TEST_CASE("span wrappers check lengths") {
  std::vector<double> a(4, 1.0), b(5, 1.0);
  CHECK_THROWS_AS(kernels::dot(a, b), DimensionError);
  CHECK_THROWS_AS(kernels::axpy(1.0, a, b), DimensionError);
  CHECK_THROWS_AS(kernels::rotate(1.0, 0.0, a, b), DimensionError);
  b.resize(4);
  CHECK(kernels::dot(a, b) == 4.0);
}
