#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

namespace robinsdp {

/// Piecewise-constant Robin coefficient, one value per interface arc.
class CoefficientVector {
 public:
  CoefficientVector() = default;
  explicit CoefficientVector(std::vector<double> values) : v_(std::move(values)) {}
  CoefficientVector(std::initializer_list<double> values) : v_(values) {}

  static CoefficientVector constant(std::size_t n, double c) {
    return CoefficientVector(std::vector<double>(n, c));
  }

  std::size_t size() const noexcept { return v_.size(); }
  double operator[](std::size_t j) const noexcept { return v_[j]; }
  double& operator[](std::size_t j) noexcept { return v_[j]; }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }
  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  std::span<const double> values() const noexcept { return v_; }

  double sum() const noexcept { return std::accumulate(v_.begin(), v_.end(), 0.0); }

  bool operator==(const CoefficientVector&) const = default;

 private:
  std::vector<double> v_;
};

/// ||x - y||_inf; sizes must match.
inline double max_abs_diff(const CoefficientVector& x, const CoefficientVector& y) {
  double r = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) r = std::max(r, std::abs(x[j] - y[j]));
  return r;
}

}  // namespace robinsdp
