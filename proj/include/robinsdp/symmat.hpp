#pragma once

// Dense symmetric matrices, eigenvalues and the Loewner order.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace robinsdp {

/// Dense symmetric m x m matrix. Both triangles are stored; every mutator
/// writes (i,j) and (j,i) together so the two always agree bit for bit.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);

  static SymMatrix zero(std::size_t dim) { return SymMatrix(dim); }
  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  /// Symmetrizes: entry (i,j) becomes (a_ij + a_ji) / 2.
  static SymMatrix from_row_major(std::size_t dim, std::span<const double> entries);
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    a_[i * dim_ + j] = v;
    a_[j * dim_ + i] = v;
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {a_.data() + i * dim_, dim_};
  }
  std::span<const double> entries() const noexcept { return a_; }

  /// Top-left k x k block.
  SymMatrix leading_block(std::size_t k) const;

  double frobenius_norm() const noexcept;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s) noexcept;
  /// this += s * other
  SymMatrix& add_scaled(double s, const SymMatrix& other);

  friend SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs) { return lhs += rhs; }
  friend SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs) { return lhs -= rhs; }
  friend SymMatrix operator*(double s, SymMatrix m) { return m *= s; }
  friend SymMatrix operator*(SymMatrix m, double s) { return m *= s; }
  friend SymMatrix operator-(SymMatrix m) { return m *= -1.0; }

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> a_;
};

/// Eigenvalues in ascending order (cyclic Jacobi).
std::vector<double> eigenvalues(const SymMatrix& a);

struct Eigensystem {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row k (length dim) is the unit eigenvector of values[k]
  std::size_t dim = 0;

  std::span<const double> vector(std::size_t k) const { return {vectors.data() + k * dim, dim}; }
};

Eigensystem eigensystem(const SymMatrix& a);

double lambda_max(const SymMatrix& a);
double lambda_min(const SymMatrix& a);
double spectral_norm(const SymMatrix& a);

/// True iff lambda_max(a - b) <= slack. Throws DimensionError on mismatch.
bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double slack);

/// Cholesky factor L L^T of a symmetric positive definite matrix.
class CholeskyFactor {
 public:
  /// Throws SolverError when the matrix is not numerically positive definite.
  explicit CholeskyFactor(const SymMatrix& a);
  static std::optional<CholeskyFactor> try_factor(const SymMatrix& a);

  std::size_t dim() const noexcept { return dim_; }
  void solve_in_place(std::span<double> rhs) const;
  std::vector<double> solve(std::span<const double> rhs) const;
  double log_det() const noexcept;

 private:
  CholeskyFactor() = default;
  bool factor(const SymMatrix& a);

  std::size_t dim_ = 0;
  std::vector<double> l_;  // row-major lower triangle (full square storage)
};

}  // namespace robinsdp
