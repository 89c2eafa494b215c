// Acceptance suite: one PASS/FAIL line per criterion. Optional argument: path
// to the command line tool, used for the end-to-end determinism check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "analytic_oracle.hpp"
#include "robinsdp/experiment.hpp"

using namespace robinsdp;
namespace fs = std::filesystem;

namespace {

constexpr double kMeshSize = 0.05;
const BoxBounds kBox{1.0, 2.0, 2};

struct Outcome {
  bool pass;
  std::string detail;
};

CoefficientVector draw(std::mt19937_64& rng, std::size_t n, double lo = 1.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  auto x = CoefficientVector::constant(n, lo);
  for (double& v : x) v = u(rng);
  return x;
}

std::string count(std::size_t ok, std::size_t total) { return std::to_string(ok) + "/" + std::to_string(total); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

DiscreteForwardMap disk(std::size_t n, std::size_t m, double h = kMeshSize) {
  return assemble(build_disk_geometry(n, 0.5, 8), h, m);
}

// shared criterion-verified reference problem (n = 2, a = 1, b = 2)
struct Reference {
  SweepResult sweep;
  DiscreteForwardMap map;
};

const Reference& reference() {
  static const Reference ref = [] {
    SweepResult s = find_sufficient_m(build_disk_geometry(2, 0.5, 8), kBox, kMeshSize, 40);
    DiscreteForwardMap map = disk(2, std::max<std::size_t>(s.m, 1));
    return Reference{std::move(s), std::move(map)};
  }();
  return ref;
}

Outcome monotonicity() {
  std::mt19937_64 rng(101);
  std::size_t ok = 0, total = 0;
  for (std::size_t n : {2u, 3u, 4u}) {
    const DiscreteForwardMap map = disk(n, 10);
    for (int t = 0; t < 200; ++t) {
      const CoefficientVector g1 = draw(rng, n);
      CoefficientVector g2 = g1;
      for (std::size_t j = 0; j < n; ++j) g2[j] = std::uniform_real_distribution<double>(g1[j], 2.0)(rng);
      ok += loewner_leq(eval_F(map, g2), eval_F(map, g1), 1e-10);
      ++total;
    }
  }
  return {ok == total, count(ok, total) + " pairs over n = 2, 3, 4"};
}

Outcome convexity() {
  std::mt19937_64 rng(102);
  std::size_t ok = 0, total = 0;
  const double ts[3] = {0.25, 0.5, 0.75};
  for (std::size_t n : {2u, 3u, 4u}) {
    const DiscreteForwardMap map = disk(n, 10);
    for (int t = 0; t < 200; ++t) {
      const CoefficientVector g0 = draw(rng, n);
      const CoefficientVector g = draw(rng, n);
      const double s = ts[std::uniform_int_distribution<int>(0, 2)(rng)];
      std::vector<double> d(n);
      auto mid = g0;
      for (std::size_t j = 0; j < n; ++j) {
        d[j] = g[j] - g0[j];
        mid[j] = (1.0 - s) * g0[j] + s * g[j];
      }
      const SymMatrix f0 = eval_F(map, g0);
      const SymMatrix f = eval_F(map, g);
      const bool tangent = loewner_leq(eval_F_prime(map, g0, d), f - f0, 1e-10);
      const bool chord = loewner_leq(eval_F(map, mid), (1.0 - s) * f0 + s * f, 1e-10);
      ok += tangent && chord;
      ++total;
    }
  }
  return {ok == total, count(ok, total) + " triples (tangent and chord) over n = 2, 3, 4"};
}

Outcome derivative() {
  std::mt19937_64 rng(103);
  const DiscreteForwardMap map = disk(3, 10);
  const double steps[3] = {1e-2, 1e-3, 1e-4};
  std::size_t ok = 0;
  double lo = 10.0, hi = -10.0;
  for (int t = 0; t < 50; ++t) {
    const CoefficientVector g = draw(rng, 3);
    std::vector<double> d(3);
    for (double& v : d) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const SymMatrix f = eval_F(map, g);
    const SymMatrix df = eval_F_prime(map, g, d);
    double err[3];
    for (int k = 0; k < 3; ++k) {
      auto gh = g;
      for (std::size_t j = 0; j < 3; ++j) gh[j] += steps[k] * d[j];
      err[k] = spectral_norm((1.0 / steps[k]) * (eval_F(map, gh) - f) - df);
    }
    bool good = true;
    for (int k = 0; k < 2; ++k) {
      const double order = std::log10(err[k] / err[k + 1]);
      lo = std::min(lo, order);
      hi = std::max(hi, order);
      good = good && order >= 0.8 && order <= 1.2;
    }
    ok += good;
  }
  return {ok == 50, count(ok, 50) + " samples, observed orders in [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

Outcome analytic_oracle() {
  const std::size_t m = 7;
  const double c = 1.5;
  const auto ref = oracle::measurement_matrix(m, c, 0.5);
  double err[2];
  const double hs[2] = {0.05, 0.025};
  for (int k = 0; k < 2; ++k) {
    const SymMatrix f = eval_F(disk(2, m, hs[k]), CoefficientVector::constant(2, c));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m * m; ++i) {
      num += (f.entries()[i] - ref[i]) * (f.entries()[i] - ref[i]);
      den += ref[i] * ref[i];
    }
    err[k] = std::sqrt(num / den);
  }
  const double order = std::log2(err[0] / err[1]);
  return {err[1] <= 1e-3 && order >= 1.6 && order <= 2.4,
          "relative error " + fmt(err[0]) + " (h = 0.05), " + fmt(err[1]) + " (h = 0.025), order " + fmt(order)};
}

Outcome attainability() {
  const SweepResult& s = reference().sweep;
  // golden values from the first verified run at mesh size 0.05
  const bool golden = s.m == 3 && std::abs(s.data.lambda - 0.0232793) <= 1e-6;
  return {s.met && s.m <= 40 && golden,
          "minimal m = " + std::to_string(s.m) + ", lambda = " + fmt(s.data.lambda) +
              (golden ? " (matches golden m = 3, lambda = 0.02328)" : " (differs from golden m = 3, lambda = 0.02328)")};
}

Outcome exact_reconstruction() {
  const DiscreteForwardMap& map = reference().map;
  const double cell = (kBox.b - kBox.a) / 40.0;
  const double opt_tol = SolverOptions{}.resolved_opt_tol(kBox);
  std::mt19937_64 rng(106);
  std::size_t ok = 0;
  double worst = 0.0, worst_gap = 0.0, worst_cells = 0.0;
  for (int t = 0; t < 20; ++t) {
    const CoefficientVector truth = draw(rng, 2);
    const SymMatrix target = eval_F(map, truth);
    const ReconstructionResult r = solve({&map, kBox, target});
    const auto grid = brute_force_minimize(map, kBox, target, 41);
    const double err = max_abs_diff(r.minimizer, truth);
    const double gap = grid ? std::abs(r.objective - grid->sum()) : INFINITY;
    worst = std::max(worst, err);
    worst_gap = std::max(worst_gap, gap);
    if (grid) worst_cells = std::max(worst_cells, max_abs_diff(r.minimizer, *grid) / cell);
    ok += err <= 1e-4 && gap <= cell * 2 + opt_tol;
  }
  return {ok == 20, count(ok, 20) + ", max error " + fmt(worst) + ", max objective gap to grid " + fmt(worst_gap) +
                        " (allowed " + fmt(cell * 2 + opt_tol) + "), max grid distance " + fmt(worst_cells) +
                        " cells"};
}

Outcome noise_bound() {
  const DiscreteForwardMap& map = reference().map;
  const CriterionData& crit = reference().sweep.data;
  std::mt19937_64 rng(107);
  std::size_t ok = 0, total = 0;
  double worst_ratio = 0.0;
  std::uint64_t seed = 1;
  for (double delta : {1e-5, 1e-4, 1e-3}) {
    for (int t = 0; t < 50; ++t) {
      const CoefficientVector truth = draw(rng, 2);
      const SymMatrix data = eval_F(map, truth) + noise_matrix(map.num_currents(), delta, seed++);
      const ReconstructionResult r = solve_noisy(map, kBox, data, delta, crit);
      const double bound = 2.0 * delta / crit.lambda + 1e-6;
      const double err = max_abs_diff(r.minimizer, truth);
      worst_ratio = std::max(worst_ratio, err / bound);
      ok += err <= bound;
      ++total;
    }
  }
  return {ok == total, count(ok, total) + ", worst error / bound = " + fmt(worst_ratio)};
}

Outcome converse_monotonicity() {
  const DiscreteForwardMap& map = reference().map;
  std::mt19937_64 rng(108);
  std::size_t ok = 0, accepted = 0, drawn = 0;
  while (accepted < 1000) {
    const CoefficientVector truth = draw(rng, 2);
    const SymMatrix target = eval_F(map, truth);
    CoefficientVector x = draw(rng, 2);
    ++drawn;
    if (x == truth || !loewner_leq(eval_F(map, x), target, 0.0)) continue;
    ++accepted;
    ok += x.sum() > truth.sum();
  }
  return {ok == 1000, count(ok, 1000) + " (" + std::to_string(drawn) + " draws)"};
}

Outcome covering() {
  const DiscreteForwardMap& map = reference().map;
  const double lambda = reference().sweep.data.lambda;
  std::mt19937_64 rng(109);
  std::size_t ok = 0;
  double worst = INFINITY;
  for (int t = 0; t < 100; ++t) {
    const CoefficientVector x = draw(rng, 2);
    for (std::size_t j = 0; j < 2; ++j) {
      const double ev = lambda_max(eval_F_prime(map, x, probe_direction(2, j)));
      worst = std::min(worst, ev);
      ok += ev >= lambda - 1e-9;
    }
  }
  return {ok == 200, count(ok, 200) + ", smallest eigenvalue " + fmt(worst) + " vs lambda " + fmt(lambda)};
}

Outcome determinism(const std::string& tool) {
  const fs::path dir = fs::temp_directory_path() / "robinsdp_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path config = dir / "config.json";
  std::ofstream(config) << R"({"true_gamma": "random", "gamma_seed": 5, "delta": 1e-4, "noise_seed": 9, "output_dir": ")"
                        << (dir / "out").string() << "\"}\n";
  std::string runs[2], csv[2];
  for (int k = 0; k < 2; ++k) {
    int code;
    if (!tool.empty()) {
      code = std::system(("\"" + tool + "\" reconstruct --config \"" + config.string() + "\" > /dev/null").c_str());
    } else {
      code = run_command("reconstruct", load_config(config), std::cerr);
    }
    if (code != 0) return {false, "reconstruct run failed with status " + std::to_string(code)};
    runs[k] = slurp(dir / "out" / "report.json");
    csv[k] = slurp(dir / "out" / "reconstruction.csv") + slurp(dir / "out" / "trace.csv");
  }
  const bool same = !runs[0].empty() && runs[0] == runs[1] && csv[0] == csv[1];
  return {same, std::string(same ? "identical" : "different") + " report.json (" + std::to_string(runs[0].size()) +
                    " bytes) and CSV outputs" + (tool.empty() ? " via library" : " via command line tool")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "";
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"discrete monotonicity", monotonicity},
      {"discrete convexity", convexity},
      {"derivative first-order decay", derivative},
      {"analytic constant-coefficient oracle", analytic_oracle},
      {"criterion attainability", attainability},
      {"exact-data reconstruction", exact_reconstruction},
      {"noise error bound", noise_bound},
      {"converse monotonicity", converse_monotonicity},
      {"covering lower bound", covering},
      {"reconstruct determinism", [&] { return determinism(tool); }},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome{false, ""};
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !outcome.pass;
    std::printf("%s  %2d  %-38s %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL", index, name, outcome.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
