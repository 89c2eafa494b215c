#include "robinsdp/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "robinsdp/errors.hpp"
#include "robinsdp/kernels.hpp"

namespace robinsdp {
namespace {

void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("symmetric matrices differ in dimension: " + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()));
  }
}

constexpr int kMaxSweeps = 64;

// Cyclic Jacobi on a full row-major copy. When `vt` is non-null it receives
// the transposed eigenvector matrix (rows are eigenvectors).
std::vector<double> jacobi(const SymMatrix& input, std::vector<double>* vt) {
  const std::size_t n = input.dim();
  std::vector<double> a(input.entries().begin(), input.entries().end());
  if (vt != nullptr) {
    vt->assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) (*vt)[i * n + i] = 1.0;
  }
  const auto& k = kernels::active();

  const double total = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  const double off_tol = 1e-17 * total;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (std::sqrt(2.0 * off) <= off_tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        k.rotate(c, s, &a[p * n], &a[q * n], n);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          a[r * n + p] = a[p * n + r];
          a[r * n + q] = a[q * n + r];
        }
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;

        if (vt != nullptr) k.rotate(c, s, &(*vt)[p * n], &(*vt)[q * n], n);
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a[i * n + i];
  return diag;
}

}  // namespace

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {
  if (dim == 0) throw ValidationError("symmetric matrix dimension must be at least 1");
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

SymMatrix SymMatrix::from_row_major(std::size_t dim, std::span<const double> entries) {
  if (entries.size() != dim * dim) {
    throw DimensionError("expected " + std::to_string(dim * dim) + " entries, got " +
                         std::to_string(entries.size()));
  }
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m.set(i, i, entries[i * dim + i]);
    for (std::size_t j = 0; j < i; ++j) {
      m.set(i, j, 0.5 * (entries[i * dim + j] + entries[j * dim + i]));
    }
  }
  return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t dim = rows.size();
  std::vector<double> flat;
  flat.reserve(dim * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw DimensionError("matrix rows must all have length " + std::to_string(dim));
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return from_row_major(dim, flat);
}

SymMatrix SymMatrix::leading_block(std::size_t k) const {
  if (k == 0 || k > dim_) throw DimensionError("leading block size out of range");
  SymMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::copy_n(a_.begin() + static_cast<std::ptrdiff_t>(i * dim_), k,
                m.a_.begin() + static_cast<std::ptrdiff_t>(i * k));
  }
  return m;
}

double SymMatrix::frobenius_norm() const noexcept {
  return std::sqrt(std::inner_product(a_.begin(), a_.end(), a_.begin(), 0.0));
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) noexcept {
  for (double& v : a_) v *= s;
  return *this;
}

SymMatrix& SymMatrix::add_scaled(double s, const SymMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += s * other.a_[i];
  return *this;
}

std::vector<double> eigenvalues(const SymMatrix& a) {
  auto values = jacobi(a, nullptr);
  std::sort(values.begin(), values.end());
  return values;
}

Eigensystem eigensystem(const SymMatrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> vt;
  const auto raw = jacobi(a, &vt);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return raw[l] < raw[r]; });
  Eigensystem es;
  es.dim = n;
  es.values.resize(n);
  es.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    es.values[k] = raw[order[k]];
    std::copy_n(vt.begin() + static_cast<std::ptrdiff_t>(order[k] * n), n,
                es.vectors.begin() + static_cast<std::ptrdiff_t>(k * n));
  }
  return es;
}

double lambda_max(const SymMatrix& a) {
  const auto v = jacobi(a, nullptr);
  return *std::max_element(v.begin(), v.end());
}

double lambda_min(const SymMatrix& a) {
  const auto v = jacobi(a, nullptr);
  return *std::min_element(v.begin(), v.end());
}

double spectral_norm(const SymMatrix& a) {
  const auto v = jacobi(a, nullptr);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return std::max(std::abs(*lo), std::abs(*hi));
}

bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double slack) {
  require_same_dim(a, b);
  if (!(slack >= 0.0)) throw ValidationError("Loewner slack must be non-negative");
  return lambda_max(a - b) <= slack;
}

CholeskyFactor::CholeskyFactor(const SymMatrix& a) {
  if (!factor(a)) throw SolverError("matrix is not positive definite");
}

std::optional<CholeskyFactor> CholeskyFactor::try_factor(const SymMatrix& a) {
  CholeskyFactor f;
  if (!f.factor(a)) return std::nullopt;
  return f;
}

bool CholeskyFactor::factor(const SymMatrix& a) {
  const std::size_t n = a.dim();
  dim_ = n;
  l_.assign(n * n, 0.0);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    double* li = &l_[i * n];
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = a(i, j) - k.dot(li, &l_[j * n], j);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        li[i] = std::sqrt(s);
      } else {
        li[j] = s / l_[j * n + j];
      }
    }
  }
  return true;
}

void CholeskyFactor::solve_in_place(std::span<double> rhs) const {
  if (rhs.size() != dim_) throw DimensionError("right-hand side length does not match factor");
  const std::size_t n = dim_;
  const auto& k = kernels::active();
  // L y = b
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = (rhs[i] - k.dot(&l_[i * n], rhs.data(), i)) / l_[i * n + i];
  }
  // L^T x = y, column sweep so the inner loop runs along rows of L
  for (std::size_t i = n; i-- > 0;) {
    rhs[i] /= l_[i * n + i];
    k.axpy(-rhs[i], &l_[i * n], rhs.data(), i);
  }
}

std::vector<double> CholeskyFactor::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

double CholeskyFactor::log_det() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += std::log(l_[i * dim_ + i]);
  return 2.0 * s;
}

}  // namespace robinsdp
