#include "robinsdp/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "robinsdp/errors.hpp"

namespace robinsdp {
namespace {

constexpr double kDecrementTol = 1e-14;  // half squared Newton decrement, relative to max(1, |phi|)
constexpr double kMinStep = 1e-12;

// Barrier merit
//   phi(x) = sum x - mu [log det(T - F(x)) + sum log(x - a) + sum log(b - x)]
class Barrier {
 public:
  Barrier(const SdpProblem& p) : p_(p), n_(p.bounds.n), m_(p.target.dim()) {}

  struct Point {
    CoefficientVector x;
    double phi = 0.0;
    double margin = 0.0;  // lambda_min(T - F(x))
  };

  bool inside_box(const CoefficientVector& x) const {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v > p_.bounds.a && v < p_.bounds.b; });
  }

  // Empty when x is not strictly feasible.
  std::optional<Point> value(const CoefficientVector& x, double mu) const {
    if (!inside_box(x)) return std::nullopt;
    const auto eig = eigenvalues(p_.target - eval_F(*p_.forward, x));
    if (eig.front() <= 0.0) return std::nullopt;
    double logdet = 0.0;
    for (double v : eig) logdet += std::log(std::max(v, 1e-300));
    double box = 0.0;
    for (double v : x) box += std::log(v - p_.bounds.a) + std::log(p_.bounds.b - v);
    return Point{x, x.sum() - mu * (logdet + box), eig.front()};
  }

  // Gradient and Hessian of phi at a strictly feasible x.
  void derivatives(const CoefficientVector& x, double mu, std::vector<double>& grad, SymMatrix& hess) const {
    const ForwardEvaluation fe = p_.forward->evaluate(x, DerivativeOrder::hessian);
    const Eigensystem es = eigensystem(p_.target - fe.value);

    // G_j = V^T F_j V scaled by 1/sqrt(lambda_k lambda_l)
    std::vector<double> inv_sqrt(m_);
    for (std::size_t k = 0; k < m_; ++k) inv_sqrt[k] = 1.0 / std::sqrt(es.values[k]);
    const auto congruence = [&](const SymMatrix& f) {
      std::vector<double> g(m_ * m_);
      std::vector<double> fv(m_);
      for (std::size_t l = 0; l < m_; ++l) {
        const auto vl = es.vector(l);
        for (std::size_t r = 0; r < m_; ++r) fv[r] = std::inner_product(vl.begin(), vl.end(), f.row(r).begin(), 0.0);
        for (std::size_t k = 0; k <= l; ++k) {
          const auto vk = es.vector(k);
          const double v = std::inner_product(vk.begin(), vk.end(), fv.begin(), 0.0) * inv_sqrt[k] * inv_sqrt[l];
          g[k * m_ + l] = v;
          g[l * m_ + k] = v;
        }
      }
      return g;
    };
    const auto trace_scaled = [&](const std::vector<double>& g) {
      double t = 0.0;
      for (std::size_t k = 0; k < m_; ++k) t += g[k * m_ + k];
      return t;
    };

    std::vector<std::vector<double>> g(n_);
    for (std::size_t j = 0; j < n_; ++j) g[j] = congruence(fe.gradient[j]);

    grad.assign(n_, 0.0);
    hess = SymMatrix(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double lo = x[j] - p_.bounds.a;
      const double hi = p_.bounds.b - x[j];
      grad[j] = 1.0 + mu * trace_scaled(g[j]) - mu / lo + mu / hi;
      for (std::size_t i = 0; i <= j; ++i) {
        const double cross = std::inner_product(g[i].begin(), g[i].end(), g[j].begin(), 0.0);
        double h = mu * (cross + trace_scaled(congruence(fe.second(i, j))));
        if (i == j) h += mu * (1.0 / (lo * lo) + 1.0 / (hi * hi));
        hess.set(i, j, h);
      }
    }
  }

 private:
  const SdpProblem& p_;
  std::size_t n_;
  std::size_t m_;
};

std::vector<double> newton_direction(const SymMatrix& hess, const std::vector<double>& grad) {
  std::vector<double> rhs(grad.size());
  for (std::size_t j = 0; j < grad.size(); ++j) rhs[j] = -grad[j];
  SymMatrix h = hess;
  double shift = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    if (auto chol = CholeskyFactor::try_factor(h)) return chol->solve(rhs);
    double diag = 0.0;
    for (std::size_t j = 0; j < h.dim(); ++j) diag = std::max(diag, std::abs(hess(j, j)));
    shift = shift == 0.0 ? 1e-14 * std::max(diag, 1.0) : 10.0 * shift;
    h = hess;
    for (std::size_t j = 0; j < h.dim(); ++j) h.set(j, j, h(j, j) + shift);
  }
  throw SolverError("barrier Hessian could not be factored");
}

double constraint_gap(const SdpProblem& p, const CoefficientVector& x) {
  return lambda_max(eval_F(*p.forward, x) - p.target);
}

void validate_problem(const SdpProblem& p) {
  if (p.forward == nullptr) throw ValidationError("problem has no forward map");
  p.bounds.validate();
  if (p.forward->num_arcs() != p.bounds.n) throw DimensionError("forward map and bounds disagree on n");
  if (p.target.dim() != p.forward->num_currents()) {
    throw DimensionError("target dimension differs from the number of boundary currents");
  }
  if (!(p.slack_added >= 0.0)) throw ValidationError("slack must be non-negative");
}

ReconstructionResult boundary_result(const SdpProblem& p, CoefficientVector x) {
  ReconstructionResult r;
  r.constraint_margin = -constraint_gap(p, x);
  r.objective = x.sum();
  r.minimizer = std::move(x);
  return r;
}

}  // namespace

ReconstructionResult solve(const SdpProblem& problem, const SolverOptions& opts) {
  validate_problem(problem);
  if (!(opts.mu_factor > 0.0 && opts.mu_factor < 1.0)) throw ValidationError("mu factor must lie in (0, 1)");
  if (!(opts.feas_tol >= 0.0)) throw ValidationError("feasibility tolerance must be non-negative");
  if (opts.max_newton == 0) throw ValidationError("max_newton must be positive");
  const double opt_tol = opts.resolved_opt_tol(problem.bounds);
  if (!(opt_tol > 0.0)) throw ValidationError("optimality tolerance must be positive");

  const BoxBounds& box = problem.bounds;
  const std::size_t n = box.n;
  const auto top = CoefficientVector::constant(n, box.b);

  // b*1 is the Loewner-smallest value of F on the box, so it decides feasibility.
  const double probe = constraint_gap(problem, top);
  if (probe > opts.feas_tol) {
    throw InfeasibleError("constraint violated at x = b*1 by " + std::to_string(probe));
  }
  if (box.b == box.a) return boundary_result(problem, top);

  Barrier barrier(problem);
  double mu = opts.mu_initial;

  std::optional<Barrier::Point> current;
  if (opts.initial_point) {
    if (opts.initial_point->size() != n) throw DimensionError("initial point has wrong length");
    current = barrier.value(*opts.initial_point, mu);
    if (!current) throw ValidationError("initial point is not strictly feasible");
  } else {
    for (double shift = 1e-3 * (box.b - box.a); shift > 1e-12 * (box.b - box.a) && !current; shift *= 0.1) {
      current = barrier.value(CoefficientVector::constant(n, box.b - shift), mu);
    }
    // No interior: the feasible set is (numerically) the single corner b*1.
    if (!current) return boundary_result(problem, top);
  }

  ReconstructionResult result;
  const double barrier_weight = static_cast<double>(problem.target.dim() + 2 * n);
  std::vector<double> grad;
  SymMatrix hess(n);
  std::size_t total = 0;

  for (std::size_t stage = 0;; ++stage) {
    current = barrier.value(current->x, mu);
    std::size_t steps = 0;
    for (;; ++steps) {
      if (steps >= opts.max_newton) {
        throw NonConvergenceError("barrier stage " + std::to_string(stage) + " did not converge in " +
                                      std::to_string(opts.max_newton) + " Newton steps",
                                  std::vector<double>(current->x.begin(), current->x.end()));
      }
      barrier.derivatives(current->x, mu, grad, hess);
      const auto dx = newton_direction(hess, grad);
      const double slope = std::inner_product(grad.begin(), grad.end(), dx.begin(), 0.0);
      if (-slope / 2.0 <= kDecrementTol * std::max(1.0, std::abs(current->phi))) break;

      double t = 1.0;
      std::optional<Barrier::Point> next;
      while (t >= kMinStep) {
        CoefficientVector trial = current->x;
        for (std::size_t j = 0; j < n; ++j) trial[j] += t * dx[j];
        next = barrier.value(trial, mu);
        if (next && next->phi <= current->phi + 0.25 * t * slope) break;
        next.reset();
        t *= 0.5;
      }
      if (!next || next->x == current->x) break;  // no measurable progress left at this mu
      current = std::move(next);
      ++total;
      result.trace.push_back({total, stage, mu, current->x.sum(), current->margin});
    }
    result.stage_objectives.push_back(current->x.sum());
    if (mu * barrier_weight < opt_tol) break;
    mu *= opts.mu_factor;
  }

  result.minimizer = current->x;
  result.objective = current->x.sum();
  result.constraint_margin = -constraint_gap(problem, current->x);
  result.iterations = total;
  return result;
}

ReconstructionResult solve_noisy(const DiscreteForwardMap& map, const BoxBounds& bounds, const SymMatrix& y_delta,
                                 double delta, const CriterionData& criterion, const SolverOptions& opts) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("noise level delta must be non-negative");
  SdpProblem p{&map, bounds, y_delta, delta};
  p.target.add_scaled(delta, SymMatrix::identity(y_delta.dim()));
  ReconstructionResult r = solve(p, opts);
  if (criterion.fulfilled()) {
    r.certified = true;
    r.certified_error_radius = 2.0 * delta * static_cast<double>(bounds.n - 1) / criterion.lambda;
  }
  return r;
}

std::optional<CoefficientVector> brute_force_minimize(const DiscreteForwardMap& map, const BoxBounds& bounds,
                                                      const SymMatrix& target, std::size_t grid_points,
                                                      double feas_tol) {
  bounds.validate();
  if (bounds.n > 3) throw ValidationError("brute force search supports n <= 3");
  if (grid_points < 2) throw ValidationError("need at least two grid points per axis");
  const std::size_t n = bounds.n;

  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= grid_points;
  std::vector<std::vector<std::size_t>> grid(total, std::vector<std::size_t>(n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t j = n; j-- > 0;) {
      grid[idx][j] = r % grid_points;
      r /= grid_points;
    }
  }
  // integer index sums order the candidates exactly by objective
  std::stable_sort(grid.begin(), grid.end(), [](const auto& l, const auto& r) {
    return std::accumulate(l.begin(), l.end(), std::size_t{0}) < std::accumulate(r.begin(), r.end(), std::size_t{0});
  });

  const double step = (bounds.b - bounds.a) / static_cast<double>(grid_points - 1);
  for (const auto& idx : grid) {
    auto x = CoefficientVector::constant(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = idx[j] + 1 == grid_points ? bounds.b : bounds.a + static_cast<double>(idx[j]) * step;
    }
    if (lambda_max(eval_F(map, x) - target) <= feas_tol) return x;
  }
  return std::nullopt;
}

nlohmann::json to_json(const ReconstructionResult& result) {
  nlohmann::json j;
  j["minimizer"] = std::vector<double>(result.minimizer.begin(), result.minimizer.end());
  j["objective"] = result.objective;
  j["constraint_margin"] = result.constraint_margin;
  j["iterations"] = result.iterations;
  j["certified"] = result.certified;
  j["certified_error_radius"] =
      result.certified_error_radius ? nlohmann::json(*result.certified_error_radius) : nlohmann::json(nullptr);
  j["stage_objectives"] = result.stage_objectives;
  return j;
}

}  // namespace robinsdp
