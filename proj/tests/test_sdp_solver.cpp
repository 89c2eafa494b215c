#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "robinsdp/errors.hpp"
#include "robinsdp/sdp_solver.hpp"

using namespace robinsdp;

namespace {
const BoxBounds kBox{1.0, 2.0, 2};
}

TEST_CASE("exact data round trip") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 5; ++t) {
    const CoefficientVector truth = fixtures::uniform(rng, 2, 1.0, 2.0);
    const ReconstructionResult r = solve({&map, kBox, eval_F(map, truth)});
    CHECK(max_abs_diff(r.minimizer, truth) <= 1e-4);
    CHECK(r.constraint_margin >= -1e-9);  // lambda_max(F(x*) - target) <= feas_tol
    CHECK(r.constraint_margin <= 1e-6);
    CHECK(r.objective == doctest::Approx(r.minimizer.sum()));
    for (std::size_t s = 1; s < r.stage_objectives.size(); ++s) {
      CHECK(r.stage_objectives[s] <= r.stage_objectives[s - 1] + 1e-12);
    }
    CHECK_FALSE(r.trace.empty());
  }
}

TEST_CASE("degenerate and infeasible programs") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  const BoxBounds point{1.5, 1.5, 2};
  const ReconstructionResult r = solve({&map, point, eval_F(map, CoefficientVector::constant(2, 1.5))});
  CHECK(r.minimizer == CoefficientVector::constant(2, 1.5));

  const SymMatrix low = eval_F(map, CoefficientVector::constant(2, 1.0)) - SymMatrix::identity(3);
  CHECK_THROWS_AS(solve({&map, kBox, low}), InfeasibleError);
  CHECK_FALSE(brute_force_minimize(map, kBox, low, 11).has_value());
  CHECK(brute_force_minimize(map, point, eval_F(map, CoefficientVector::constant(2, 1.5)), 5) ==
        CoefficientVector::constant(2, 1.5));
}

TEST_CASE("agreement with the grid oracle") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  std::mt19937_64 rng(32);
  const double cell = (kBox.b - kBox.a) / 40.0;
  for (int t = 0; t < 3; ++t) {
    const CoefficientVector truth = fixtures::uniform(rng, 2, 1.0, 2.0);
    const SymMatrix target = eval_F(map, truth);
    const ReconstructionResult r = solve({&map, kBox, target});
    const auto grid = brute_force_minimize(map, kBox, target, 41);
    REQUIRE(grid.has_value());
    const double gap = std::abs(r.objective - grid->sum());
    CHECK(gap <= cell * 2 + kBox.b * 2e-7);
  }
}

TEST_CASE("minimizer does not depend on the starting point") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  const CoefficientVector truth{1.25, 1.65};
  const SymMatrix target = eval_F(map, truth);
  SolverOptions a, b;
  a.initial_point = CoefficientVector{1.99, 1.99};
  b.initial_point = CoefficientVector{1.7, 1.95};
  const auto ra = solve({&map, kBox, target}, a);
  const auto rb = solve({&map, kBox, target}, b);
  CHECK(max_abs_diff(ra.minimizer, rb.minimizer) <= 1e-6);
}

TEST_CASE("rescaling the measurements leaves the minimizer unchanged") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  const DiscreteForwardMap scaled = map.with_scaled_loads(std::sqrt(3.0));
  const CoefficientVector truth{1.55, 1.2};
  const auto r1 = solve({&map, kBox, eval_F(map, truth)});
  const auto r2 = solve({&scaled, kBox, eval_F(scaled, truth)});
  CHECK(max_abs_diff(r1.minimizer, r2.minimizer) <= 1e-8);
}

TEST_CASE("noisy program") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  const CriterionData crit = evaluate_criterion(map, kBox);
  REQUIRE(crit.fulfilled());
  const CoefficientVector truth{1.45, 1.85};
  const SymMatrix exact = eval_F(map, truth);

  const auto r0 = solve_noisy(map, kBox, exact, 0.0, crit);
  CHECK(max_abs_diff(r0.minimizer, truth) <= 1e-4);
  REQUIRE(r0.certified_error_radius.has_value());
  CHECK(*r0.certified_error_radius == 0.0);

  const double delta = 1e-4;
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  for (int t = 0; t < 5; ++t) {
    SymMatrix e(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j <= i; ++j) e.set(i, j, g(rng));
    e *= delta / spectral_norm(e);
    const SymMatrix data = exact + e;
    // the truth stays feasible for the relaxed program
    CHECK(lambda_max(exact - data - delta * SymMatrix::identity(3)) <= 1e-15);
    const auto r = solve_noisy(map, kBox, data, delta, crit);
    REQUIRE(r.certified);
    CHECK(*r.certified_error_radius == doctest::Approx(2 * delta / crit.lambda));
    CHECK(max_abs_diff(r.minimizer, truth) <= *r.certified_error_radius + 1e-6);
  }
  CHECK_THROWS_AS(solve_noisy(map, kBox, exact, -1e-3, crit), ValidationError);
}

TEST_CASE("uncertified result without the criterion") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 1);
  const CriterionData crit = evaluate_criterion(map, kBox);
  const auto r = solve_noisy(map, kBox, eval_F(map, CoefficientVector{1.5, 1.5}), 0.0, crit);
  CHECK_FALSE(r.certified);
  CHECK_FALSE(r.certified_error_radius.has_value());
}

TEST_CASE("stage cap surfaces the current iterate") {
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  SolverOptions opts;
  opts.max_newton = 1;
  try {
    solve({&map, kBox, eval_F(map, CoefficientVector{1.3, 1.3})}, opts);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.best_iterate().size() == 2);
  }
}

TEST_CASE("targets near the upper corner converge") {
  // this seed includes a draw near b*1 that once stalled the inner Newton loop
  const DiscreteForwardMap& map = fixtures::disk_map(2, 3);
  std::mt19937_64 rng(106);
  for (int t = 0; t < 20; ++t) {
    const CoefficientVector truth = fixtures::uniform(rng, 2, 1.0, 2.0);
    CAPTURE(t);
    const auto r = solve({&map, kBox, eval_F(map, truth)});
    CHECK(max_abs_diff(r.minimizer, truth) <= 1e-4);
  }
  const CoefficientVector corner{1.999, 1.9995};
  CHECK(max_abs_diff(solve({&map, kBox, eval_F(map, corner)}).minimizer, corner) <= 1e-4);
}
