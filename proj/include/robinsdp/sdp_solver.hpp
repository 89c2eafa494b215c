#pragma once

// Convex nonlinear semidefinite program
//
//   minimize sum_j x_j  subject to  x in [a, b]^n,  F(x) <= target (Loewner)
//
// solved by logarithmic-barrier path following.

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "robinsdp/coefficients.hpp"
#include "robinsdp/criterion.hpp"
#include "robinsdp/fem_forward.hpp"
#include "robinsdp/symmat.hpp"

namespace robinsdp {

struct SolverOptions {
  std::optional<double> opt_tol;  // default 1e-7 * n * b
  double feas_tol = 1e-9;
  std::size_t max_newton = 200;  // per barrier parameter
  double mu_factor = 0.2;
  double mu_initial = 1.0;
  // Strictly feasible start; defaults to b*1 moved inward.
  std::optional<CoefficientVector> initial_point;

  double resolved_opt_tol(const BoxBounds& bounds) const {
    return opt_tol.value_or(1e-7 * static_cast<double>(bounds.n) * bounds.b);
  }
};

struct SdpProblem {
  const DiscreteForwardMap* forward = nullptr;
  BoxBounds bounds;
  SymMatrix target{1};
  double slack_added = 0.0;  // delta of the noisy program, 0 for exact data
};

struct TraceRow {
  std::size_t iteration = 0;  // cumulative Newton step
  std::size_t outer = 0;      // barrier stage
  double mu = 0.0;
  double objective = 0.0;
  double margin = 0.0;
};

struct ReconstructionResult {
  CoefficientVector minimizer;
  double objective = 0.0;
  double constraint_margin = 0.0;  // -lambda_max(F(x*) - target)
  std::size_t iterations = 0;
  std::optional<double> certified_error_radius;
  bool certified = false;
  std::vector<TraceRow> trace;
  std::vector<double> stage_objectives;  // objective after each barrier stage
};

/// Throws InfeasibleError when even b*1 violates the constraint by more than
/// feas_tol, NonConvergenceError when a barrier stage exceeds max_newton.
ReconstructionResult solve(const SdpProblem& problem, const SolverOptions& opts = {});

/// Program with target y_delta + delta I. Attaches the radius
/// 2 delta (n - 1) / lambda when the criterion is fulfilled.
ReconstructionResult solve_noisy(const DiscreteForwardMap& map, const BoxBounds& bounds, const SymMatrix& y_delta,
                                 double delta, const CriterionData& criterion, const SolverOptions& opts = {});

/// Exhaustive search over the uniform grid with grid_points per axis (n <= 3).
/// Returns the feasible grid point with the smallest sum, or nothing.
std::optional<CoefficientVector> brute_force_minimize(const DiscreteForwardMap& map, const BoxBounds& bounds,
                                                      const SymMatrix& target, std::size_t grid_points,
                                                      double feas_tol = 1e-9);

nlohmann::json to_json(const ReconstructionResult& result);

}  // namespace robinsdp
