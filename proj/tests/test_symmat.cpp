#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "robinsdp/errors.hpp"
#include "robinsdp/kernels.hpp"
#include "robinsdp/symmat.hpp"

using namespace robinsdp;

namespace {

SymMatrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a.set(i, j, g(rng));
  return a;
}

// larger root of t^2 - (p + r) t + (p r - q^2)
double two_by_two_max(double p, double q, double r) {
  const double mean = 0.5 * (p + r);
  return mean + std::hypot(0.5 * (p - r), q);
}

}  // namespace

TEST_CASE("lambda_max examples") {
  CHECK(lambda_max(SymMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-15));
  const double d[2] = {1.0, -2.0};
  CHECK(lambda_max(SymMatrix::diagonal(d)) == doctest::Approx(1.0));
  CHECK(lambda_max(SymMatrix::from_rows({{0, 1}, {1, 0}})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("loewner_leq examples") {
  const double neg[2] = {-1.0, -1.0};
  const double mixed[2] = {1.0, -5.0};
  CHECK(loewner_leq(SymMatrix::zero(2), SymMatrix::zero(2), 0.0));
  CHECK(loewner_leq(SymMatrix::diagonal(neg), SymMatrix::zero(2), 0.0));
  CHECK_FALSE(loewner_leq(SymMatrix::diagonal(mixed), SymMatrix::zero(2), 0.0));
  CHECK_THROWS_AS(loewner_leq(SymMatrix::zero(2), SymMatrix::zero(3), 0.0), DimensionError);
  CHECK_THROWS_AS(loewner_leq(SymMatrix::zero(2), SymMatrix::zero(2), -1.0), ValidationError);
}

TEST_CASE("spectral_norm examples") {
  const double d[2] = {3.0, -4.0};
  CHECK(spectral_norm(SymMatrix::diagonal(d)) == doctest::Approx(4.0));
  CHECK(spectral_norm(SymMatrix::zero(5)) == 0.0);
  CHECK(spectral_norm(SymMatrix::from_rows({{0, 2}, {2, 0}})) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(SymMatrix(0), ValidationError);
  const double raw[4] = {1.0, 2.0, 4.0, 3.0};
  const SymMatrix s = SymMatrix::from_row_major(2, raw);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == 3.0);
  CHECK(s.leading_block(1)(0, 0) == 1.0);
}

TEST_CASE("2x2 matrices match the characteristic polynomial root") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < 500; ++t) {
    const double p = u(rng), q = u(rng), r = u(rng);
    const SymMatrix a = SymMatrix::from_rows({{p, q}, {q, r}});
    CHECK(std::abs(lambda_max(a) - two_by_two_max(p, q, r)) <= 1e-10);
  }
}

TEST_CASE("eigenvalues agree with Eigen's self-adjoint solver") {
  std::mt19937_64 rng(8);
  for (std::size_t n : {1u, 2u, 3u, 7u, 20u, 45u}) {
    CAPTURE(n);
    const SymMatrix a = random_symmetric(rng, n);
    Eigen::MatrixXd e(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues();
    const auto vals = eigenvalues(a);
    const double scale = ref.cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(vals[k] - ref(k)) <= 1e-12 * scale);
  }
}

TEST_CASE("eigenvectors satisfy A v = lambda v") {
  std::mt19937_64 rng(9);
  const SymMatrix a = random_symmetric(rng, 12);
  const Eigensystem sys = eigensystem(a);
  for (std::size_t k = 0; k < 12; ++k) {
    const auto v = sys.vector(k);
    double res = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
      double av = 0.0;
      for (std::size_t j = 0; j < 12; ++j) av += a(i, j) * v[j];
      res = std::max(res, std::abs(av - sys.values[k] * v[i]));
    }
    CHECK(res <= 1e-12 * spectral_norm(a));
  }
}

TEST_CASE("scalar and avx2 eigenvalue paths agree") {
  if (kernels::avx2_table() == nullptr || !kernels::cpu_supports_avx2()) return;
  std::mt19937_64 rng(10);
  const SymMatrix a = random_symmetric(rng, 33);
  const kernels::Isa before = kernels::active().isa;
  kernels::select(kernels::Isa::scalar);
  const auto ref = eigenvalues(a);
  kernels::select(kernels::Isa::avx2);
  const auto fast = eigenvalues(a);
  kernels::select(before);
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(ref[k] - fast[k]) <= 1e-12 * spectral_norm(a));
}

TEST_CASE("Loewner order is transitive up to eigensolver tolerance") {
  std::mt19937_64 rng(12);
  int chains = 0;
  for (int t = 0; t < 200; ++t) {
    const SymMatrix c = random_symmetric(rng, 4);
    SymMatrix p1 = random_symmetric(rng, 4), p2 = random_symmetric(rng, 4);
    // B = C - P1 P1^T, A = B - P2 P2^T
    SymMatrix g1(4), g2(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
          s1 += p1(i, k) * p1(j, k);
          s2 += p2(i, k) * p2(j, k);
        }
        g1.set(i, j, s1);
        g2.set(i, j, s2);
      }
    const SymMatrix b = c - g1;
    const SymMatrix a = b - g2;
    const double tol = 1e-12 * (spectral_norm(c) + spectral_norm(g1) + spectral_norm(g2));
    if (loewner_leq(a, b, tol) && loewner_leq(b, c, tol)) {
      ++chains;
      CHECK(loewner_leq(a, c, tol * 4));
    }
  }
  CHECK(chains == 200);
}

TEST_CASE("Cholesky factor") {
  const SymMatrix a = SymMatrix::from_rows({{4, 2}, {2, 3}});
  const CholeskyFactor f(a);
  CHECK(f.log_det() == doctest::Approx(std::log(8.0)));
  const double rhs[2] = {2.0, 1.0};
  const auto x = f.solve(rhs);
  CHECK(4 * x[0] + 2 * x[1] == doctest::Approx(2.0));
  CHECK(2 * x[0] + 3 * x[1] == doctest::Approx(1.0));
  CHECK_FALSE(CholeskyFactor::try_factor(SymMatrix::from_rows({{1, 2}, {2, 1}})).has_value());
  CHECK_THROWS_AS(CholeskyFactor(SymMatrix::from_rows({{1, 2}, {2, 1}})), SolverError);
}
