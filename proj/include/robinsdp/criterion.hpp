#pragma once

// Sufficient criterion for unique solvability and convex reformulation of
// the finite-dimensional inverse problem: finitely many probe points z_{j,k}
// and directions d_j whose derivative matrices F'(z_{j,k}) d_j must each
// possess a positive eigenvalue.

#include <cstddef>
#include <limits>
#include <vector>

#include <json.hpp>

#include "robinsdp/coefficients.hpp"
#include "robinsdp/fem_forward.hpp"

namespace robinsdp {

/// Threshold separating a numerically fulfilled criterion from eigenvalues
/// that are positive by round-off only.
inline constexpr double kLambdaFloor = 1e-8;

/// A-priori box [a, b]^n for the coefficient.
struct BoxBounds {
  double a = 1.0;
  double b = 2.0;
  std::size_t n = 2;

  /// Throws ValidationError unless 0 < a <= b and n >= 2.
  void validate() const;
  bool contains(const CoefficientVector& x, double tol = 0.0) const;
};

/// Probe points, directions and (once evaluated) the derivative eigenvalues.
/// Arc index j is zero-based; k runs over 2..K as in the covering argument.
struct CriterionData {
  BoxBounds bounds;
  std::size_t K = 2;
  long K_closed_form = 0;
  std::size_t m = 0;  // measurement count used for the eigenvalues (0: not evaluated)
  std::vector<std::vector<CoefficientVector>> points;  // [j][k - 2]
  std::vector<std::vector<double>> directions;         // [j]
  std::vector<std::vector<double>> eigenvalues;        // [j][k - 2]
  double lambda = std::numeric_limits<double>::quiet_NaN();

  const CoefficientVector& point(std::size_t j, std::size_t k) const { return points.at(j).at(k - 2); }
  double eigenvalue(std::size_t j, std::size_t k) const { return eigenvalues.at(j).at(k - 2); }
  bool evaluated() const noexcept { return m > 0; }
  bool fulfilled(double floor = kLambdaFloor) const noexcept { return evaluated() && lambda > floor; }
};

/// Smallest K >= 2 with a + K a / (4(n-1)) >= b + a / (4(n-1)).
std::size_t compute_K(const BoxBounds& bounds);

/// ceil(4(n-1) b / a) - 4n - 3; reported next to compute_K for comparison.
long closed_form_K(const BoxBounds& bounds);

/// z_{j,k} = (a/2) e_j' + (a + k a / (4(n-1))) e_j,
/// d_j     = ((2b - a)/a)(n-1) e_j' - (1/2) e_j.
CriterionData build_points(const BoxBounds& bounds);

/// (n-1) e_j' - e_j.
std::vector<double> probe_direction(std::size_t n, std::size_t j);

/// Fills eigenvalues[j][k] = lambda_max(F'(z_{j,k}) d_j) and their minimum.
CriterionData evaluate_criterion(const DiscreteForwardMap& map, const BoxBounds& bounds);

struct SweepResult {
  bool met = false;
  std::size_t m = 0;        // smallest sufficient m, or the best m when not met
  CriterionData data;       // evaluated at m
  double best_lambda = -std::numeric_limits<double>::infinity();
  std::vector<double> lambda_by_m;  // lambda for m = 1, 2, ... as far as the sweep ran
};

/// Sweeps m = 1, 2, ... up to map.num_currents(). The measurement matrix for
/// m currents is the leading m x m block of the one for more currents, so a
/// single set of derivative matrices serves the whole sweep.
SweepResult sweep_measurements(const DiscreteForwardMap& map, const BoxBounds& bounds,
                               double floor = kLambdaFloor);

/// Assembles with m_max currents and sweeps. Throws ValidationError for m_max == 0.
SweepResult find_sufficient_m(const Geometry& geometry, const BoxBounds& bounds, double mesh_size,
                              std::size_t m_max, double floor = kLambdaFloor);

/// Checks the implication
///   lambda_max(F(y) - F(x)) < lambda ||y - x||_inf / (n - 1)  =>  sum_j (y_j - x_j) > 0.
/// Vacuously true when the hypothesis fails, including y == x.
bool converse_monotonicity_check(const DiscreteForwardMap& map, const BoxBounds& bounds,
                                 const CoefficientVector& x, const CoefficientVector& y, double lambda);

nlohmann::json to_json(const BoxBounds& bounds);
nlohmann::json to_json(const CriterionData& data);

}  // namespace robinsdp
