#include "robinsdp/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "robinsdp/errors.hpp"

namespace robinsdp {
namespace {

double min_eigenvalue(const std::vector<std::vector<double>>& eig) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : eig) {
    for (double v : row) lo = std::min(lo, v);
  }
  return lo;
}

}  // namespace

void BoxBounds::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("lower bound a must be positive");
  if (!(b >= a) || !std::isfinite(b)) throw ValidationError("upper bound b must satisfy b >= a");
  if (n < 2) throw ValidationError("need at least two unknowns (n >= 2)");
}

bool BoxBounds::contains(const CoefficientVector& x, double tol) const {
  if (x.size() != n) return false;
  return std::all_of(x.begin(), x.end(), [&](double v) { return v >= a - tol && v <= b + tol; });
}

std::size_t compute_K(const BoxBounds& bounds) {
  bounds.validate();
  const double step = bounds.a / (4.0 * static_cast<double>(bounds.n - 1));
  const auto covers = [&](std::size_t k) {
    return bounds.a + static_cast<double>(k) * step >= bounds.b + step;
  };
  // start from the real-valued solution and correct for rounding
  auto k = static_cast<std::size_t>(
      std::max(2.0, std::ceil(4.0 * static_cast<double>(bounds.n - 1) * (bounds.b - bounds.a) / bounds.a) + 1.0));
  while (!covers(k)) ++k;
  while (k > 2 && covers(k - 1)) --k;
  return k;
}

long closed_form_K(const BoxBounds& bounds) {
  bounds.validate();
  const auto n = static_cast<double>(bounds.n);
  return static_cast<long>(std::ceil(4.0 * (n - 1.0) * bounds.b / bounds.a)) - 4 * static_cast<long>(bounds.n) - 3;
}

std::vector<double> probe_direction(std::size_t n, std::size_t j) {
  std::vector<double> d(n, static_cast<double>(n - 1));
  d.at(j) = -1.0;
  return d;
}

CriterionData build_points(const BoxBounds& bounds) {
  bounds.validate();
  CriterionData data;
  data.bounds = bounds;
  data.K = compute_K(bounds);
  data.K_closed_form = closed_form_K(bounds);

  const std::size_t n = bounds.n;
  const double a = bounds.a;
  const double nm1 = static_cast<double>(n - 1);
  const double off_direction = (2.0 * bounds.b - a) / a * nm1;
  data.points.resize(n);
  data.directions.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 2; k <= data.K; ++k) {
      auto z = CoefficientVector::constant(n, a / 2.0);
      z[j] = a + static_cast<double>(k) * a / (4.0 * nm1);
      data.points[j].push_back(std::move(z));
    }
    data.directions[j].assign(n, off_direction);
    data.directions[j][j] = -0.5;
  }
  return data;
}

CriterionData evaluate_criterion(const DiscreteForwardMap& map, const BoxBounds& bounds) {
  CriterionData data = build_points(bounds);
  if (map.num_arcs() != bounds.n) throw DimensionError("forward map and bounds disagree on n");
  data.m = map.num_currents();
  data.eigenvalues.resize(bounds.n);
  for (std::size_t j = 0; j < bounds.n; ++j) {
    for (const auto& z : data.points[j]) {
      data.eigenvalues[j].push_back(lambda_max(map.derivative(z, data.directions[j])));
    }
  }
  data.lambda = min_eigenvalue(data.eigenvalues);
  return data;
}

SweepResult sweep_measurements(const DiscreteForwardMap& map, const BoxBounds& bounds, double floor) {
  const CriterionData probes = build_points(bounds);
  if (map.num_arcs() != bounds.n) throw DimensionError("forward map and bounds disagree on n");
  const std::size_t n = bounds.n;

  std::vector<std::vector<SymMatrix>> derivs(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& z : probes.points[j]) derivs[j].push_back(map.derivative(z, probes.directions[j]));
  }

  SweepResult result;
  for (std::size_t m = 1; m <= map.num_currents(); ++m) {
    CriterionData data = probes;
    data.m = m;
    data.eigenvalues.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& d : derivs[j]) data.eigenvalues[j].push_back(lambda_max(d.leading_block(m)));
    }
    data.lambda = min_eigenvalue(data.eigenvalues);
    result.lambda_by_m.push_back(data.lambda);
    if (data.lambda > result.best_lambda) {
      result.best_lambda = data.lambda;
      result.m = m;
      result.data = data;
    }
    if (data.lambda > floor) {
      result.met = true;
      result.m = m;
      result.data = std::move(data);
      break;
    }
  }
  return result;
}

SweepResult find_sufficient_m(const Geometry& geometry, const BoxBounds& bounds, double mesh_size,
                              std::size_t m_max, double floor) {
  if (m_max == 0) throw ValidationError("m_max must be at least 1");
  bounds.validate();
  if (geometry.num_arcs() != bounds.n) throw ValidationError("geometry arc count differs from n");
  return sweep_measurements(assemble(geometry, mesh_size, m_max), bounds, floor);
}

bool converse_monotonicity_check(const DiscreteForwardMap& map, const BoxBounds& bounds,
                                 const CoefficientVector& x, const CoefficientVector& y, double lambda) {
  const double dist = max_abs_diff(x, y);
  if (dist == 0.0) return true;
  const double gap = lambda_max(eval_F(map, y) - eval_F(map, x));
  const bool hypothesis = gap < lambda * dist / static_cast<double>(bounds.n - 1);
  if (!hypothesis) return true;
  return y.sum() - x.sum() > 0.0;
}

nlohmann::json to_json(const BoxBounds& bounds) {
  return {{"a", bounds.a}, {"b", bounds.b}, {"n", bounds.n}};
}

nlohmann::json to_json(const CriterionData& data) {
  nlohmann::json j;
  j["bounds"] = to_json(data.bounds);
  j["K"] = data.K;
  j["K_closed_form"] = data.K_closed_form;
  j["m"] = data.m;
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : data.directions) dirs.push_back(d);
  j["directions"] = dirs;
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t a = 0; a < data.points.size(); ++a) {
    for (std::size_t k = 2; k <= data.K; ++k) {
      nlohmann::json p;
      p["j"] = a + 1;
      p["k"] = k;
      p["z"] = std::vector<double>(data.point(a, k).begin(), data.point(a, k).end());
      if (data.evaluated()) p["eigenvalue"] = data.eigenvalue(a, k);
      pairs.push_back(std::move(p));
    }
  }
  j["pairs"] = pairs;
  if (data.evaluated()) {
    j["lambda"] = data.lambda;
    j["passed"] = data.fulfilled();
  }
  return j;
}

}  // namespace robinsdp
