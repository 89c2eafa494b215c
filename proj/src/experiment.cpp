#include "robinsdp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "robinsdp/errors.hpp"

namespace robinsdp {
namespace {

using nlohmann::json;

constexpr double kOrderSlack = 1e-10;

std::vector<double> to_vector(const CoefficientVector& x) { return {x.begin(), x.end()}; }

std::string describe(const CoefficientVector& x) { return json(to_vector(x)).dump(); }

CoefficientVector uniform_point(std::mt19937_64& rng, const BoxBounds& box) {
  std::uniform_real_distribution<double> u(box.a, box.b);
  auto x = CoefficientVector::constant(box.n, box.a);
  for (double& v : x) v = u(rng);
  return x;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

void write_report(const ExperimentConfig& config, const json& report) {
  write_text(config.output_dir / "report.json", report.dump(2) + "\n");
}

PropertyOutcome named_outcome(std::string name) {
  PropertyOutcome p;
  p.name = std::move(name);
  return p;
}

std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

struct Setup {
  DiscreteForwardMap map;
  CriterionData criterion;
  std::optional<SweepResult> sweep;
};

// The measurement count is either fixed by the config or the smallest one
// the sweep finds (the best one when the sweep is exhausted).
Setup prepare(const ExperimentConfig& config) {
  const Geometry geometry = make_geometry(config);
  if (config.m) {
    DiscreteForwardMap map = assemble(geometry, config.mesh_size, *config.m);
    CriterionData crit = evaluate_criterion(map, config.bounds);
    return {std::move(map), std::move(crit), std::nullopt};
  }
  SweepResult sweep = find_sufficient_m(geometry, config.bounds, config.mesh_size, config.m_max);
  DiscreteForwardMap map = assemble(geometry, config.mesh_size, sweep.m);
  CriterionData crit = sweep.data;
  return {std::move(map), std::move(crit), std::move(sweep)};
}

json sweep_json(const SweepResult& sweep) {
  json rows = json::array();
  for (std::size_t k = 0; k < sweep.lambda_by_m.size(); ++k) {
    rows.push_back({{"m", k + 1}, {"lambda", sweep.lambda_by_m[k]}});
  }
  return {{"met", sweep.met}, {"m", sweep.m}, {"best_lambda", sweep.best_lambda}, {"lambda_by_m", rows}};
}

json base_report(const std::string& command, const ExperimentConfig& config) {
  json r;
  r["command"] = command;
  r["config"] = to_json(config);
  return r;
}

template <class T>
T get_value(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  bounds.validate();
  if (!(interface_radius > 0.0 && interface_radius < 1.0)) throw ValidationError("interface_radius must lie in (0, 1)");
  if (segments_per_arc < 2) throw ValidationError("segments_per_arc must be at least 2");
  if (!(mesh_size > 0.0) || !std::isfinite(mesh_size)) throw ValidationError("mesh_size must be positive");
  if (m && *m == 0) throw ValidationError("m must be at least 1");
  if (m_max == 0) throw ValidationError("m_max must be at least 1");
  if (true_gamma) {
    if (true_gamma->size() != bounds.n) throw ValidationError("true_gamma must have n entries");
    if (!bounds.contains(*true_gamma)) throw ValidationError("true_gamma lies outside [a, b]^n");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be non-negative");
  if (solver.opt_tol && !(*solver.opt_tol > 0.0)) throw ValidationError("opt_tol must be positive");
  if (!(solver.feas_tol >= 0.0)) throw ValidationError("feas_tol must be non-negative");
  if (solver.max_newton == 0) throw ValidationError("max_newton must be positive");
  if (!(solver.mu_factor > 0.0 && solver.mu_factor < 1.0)) throw ValidationError("mu_factor must lie in (0, 1)");
  if (samples == 0) throw ValidationError("samples must be positive");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "a",         "b",          "n",       "interface_radius", "segments_per_arc", "mesh_size", "m",
      "m_max",     "true_gamma", "gamma_seed", "delta",         "noise_seed",       "opt_tol",   "feas_tol",
      "max_newton", "mu_factor", "samples", "seed",             "output_dir",       "force"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("unknown config field '" + key + "'");
    }
  }
  ExperimentConfig c;
  const auto has = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
  if (has("a")) c.bounds.a = get_value<double>(j, "a");
  if (has("b")) c.bounds.b = get_value<double>(j, "b");
  if (has("n")) c.bounds.n = get_value<std::size_t>(j, "n");
  if (has("interface_radius")) c.interface_radius = get_value<double>(j, "interface_radius");
  if (has("segments_per_arc")) c.segments_per_arc = get_value<std::size_t>(j, "segments_per_arc");
  if (has("mesh_size")) c.mesh_size = get_value<double>(j, "mesh_size");
  if (has("m")) c.m = get_value<std::size_t>(j, "m");
  if (has("m_max")) c.m_max = get_value<std::size_t>(j, "m_max");
  if (has("true_gamma")) {
    const json& g = j.at("true_gamma");
    if (g.is_string()) {
      if (g.get<std::string>() != "random") throw ValidationError("true_gamma must be an array or \"random\"");
    } else {
      c.true_gamma = CoefficientVector(get_value<std::vector<double>>(j, "true_gamma"));
    }
  }
  if (has("gamma_seed")) c.gamma_seed = get_value<std::uint64_t>(j, "gamma_seed");
  if (has("delta")) c.delta = get_value<double>(j, "delta");
  if (has("noise_seed")) c.noise_seed = get_value<std::uint64_t>(j, "noise_seed");
  if (has("opt_tol")) c.solver.opt_tol = get_value<double>(j, "opt_tol");
  if (has("feas_tol")) c.solver.feas_tol = get_value<double>(j, "feas_tol");
  if (has("max_newton")) c.solver.max_newton = get_value<std::size_t>(j, "max_newton");
  if (has("mu_factor")) c.solver.mu_factor = get_value<double>(j, "mu_factor");
  if (has("samples")) c.samples = get_value<std::size_t>(j, "samples");
  if (has("seed")) c.seed = get_value<std::uint64_t>(j, "seed");
  if (has("output_dir")) c.output_dir = get_value<std::string>(j, "output_dir");
  if (has("force")) c.force = get_value<bool>(j, "force");
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["a"] = c.bounds.a;
  j["b"] = c.bounds.b;
  j["n"] = c.bounds.n;
  j["interface_radius"] = c.interface_radius;
  j["segments_per_arc"] = c.segments_per_arc;
  j["mesh_size"] = c.mesh_size;
  j["m"] = c.m ? json(*c.m) : json(nullptr);
  j["m_max"] = c.m_max;
  j["true_gamma"] = c.true_gamma ? json(to_vector(*c.true_gamma)) : json("random");
  j["gamma_seed"] = c.gamma_seed;
  j["delta"] = c.delta;
  j["noise_seed"] = c.noise_seed;
  j["opt_tol"] = c.solver.resolved_opt_tol(c.bounds);
  j["feas_tol"] = c.solver.feas_tol;
  j["max_newton"] = c.solver.max_newton;
  j["mu_factor"] = c.solver.mu_factor;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  j["force"] = c.force;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

Geometry make_geometry(const ExperimentConfig& config) {
  return build_disk_geometry(config.bounds.n, config.interface_radius, config.segments_per_arc);
}

CoefficientVector resolve_true_gamma(const ExperimentConfig& config) {
  if (config.true_gamma) return *config.true_gamma;
  std::mt19937_64 rng(config.gamma_seed);
  return uniform_point(rng, config.bounds);
}

SymMatrix noise_matrix(std::size_t m, double delta, std::uint64_t seed) {
  SymMatrix e(m);
  if (delta == 0.0) return e;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> g(m * m);
  for (double& v : g) v = normal(rng);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) e.set(i, j, 0.5 * (g[i * m + j] + g[j * m + i]));
  }
  const double norm = spectral_norm(e);
  if (!(norm > 0.0)) throw SolverError("noise draw is the zero matrix");
  e *= delta / norm;
  return e;
}

bool PropertyReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyOutcome& p) { return p.failed == 0; });
}

PropertyReport run_property_suite(const DiscreteForwardMap& map, const BoxBounds& bounds, std::size_t samples,
                                  std::uint64_t seed, const std::optional<CriterionData>& criterion) {
  bounds.validate();
  const std::size_t n = bounds.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PropertyReport report;

  const auto record = [](PropertyOutcome& out, std::size_t s, bool ok, const std::string& what) {
    ++out.samples;
    if (ok) {
      ++out.passed;
    } else {
      ++out.failed;
      if (out.first_failure.empty()) out.first_failure = "sample " + std::to_string(s) + ": " + what;
    }
  };

  {
    PropertyOutcome p = named_outcome("monotonicity");
    for (std::size_t s = 0; s < samples; ++s) {
      try {
        const CoefficientVector lo = uniform_point(rng, bounds);
        CoefficientVector hi = lo;
        for (std::size_t j = 0; j < n; ++j) hi[j] += unit(rng) * (bounds.b - lo[j]);
        const double gap = lambda_max(eval_F(map, hi) - eval_F(map, lo));
        record(p, s, gap <= kOrderSlack,
               "gamma1=" + describe(lo) + " gamma2=" + describe(hi) + " lambda_max=" + csv_number(gap));
      } catch (const Error& e) {
        record(p, s, false, std::string("evaluation failed: ") + e.what());
      }
    }
    report.properties.push_back(std::move(p));
  }

  {
    PropertyOutcome tangent = named_outcome("convexity_tangent");
    PropertyOutcome chord = named_outcome("convexity_chord");
    static constexpr double kT[3] = {0.25, 0.5, 0.75};
    for (std::size_t s = 0; s < samples; ++s) {
      try {
        const CoefficientVector g0 = uniform_point(rng, bounds);
        const CoefficientVector g1 = uniform_point(rng, bounds);
        std::vector<double> d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = g1[j] - g0[j];
        const SymMatrix f0 = eval_F(map, g0);
        const SymMatrix f1 = eval_F(map, g1);
        const double tgap = lambda_max(eval_F_prime(map, g0, d) - (f1 - f0));
        record(tangent, s, tgap <= kOrderSlack,
               "gamma0=" + describe(g0) + " gamma=" + describe(g1) + " lambda_max=" + csv_number(tgap));

        const double t = kT[s % 3];
        auto mid = g0;
        for (std::size_t j = 0; j < n; ++j) mid[j] = (1.0 - t) * g0[j] + t * g1[j];
        const double cgap = lambda_max(eval_F(map, mid) - ((1.0 - t) * f0 + t * f1));
        record(chord, s, cgap <= kOrderSlack,
               "gamma0=" + describe(g0) + " gamma1=" + describe(g1) + " t=" + csv_number(t) +
                   " lambda_max=" + csv_number(cgap));
      } catch (const Error& e) {
        record(tangent, s, false, std::string("evaluation failed: ") + e.what());
      }
    }
    report.properties.push_back(std::move(tangent));
    report.properties.push_back(std::move(chord));
  }

  {
    PropertyOutcome p = named_outcome("derivative_first_order");
    static constexpr double kSteps[3] = {1e-2, 1e-3, 1e-4};
    for (std::size_t s = 0; s < samples; ++s) {
      try {
        const CoefficientVector g = uniform_point(rng, bounds);
        std::vector<double> d(n);
        for (double& v : d) v = 2.0 * unit(rng) - 1.0;
        const SymMatrix f = eval_F(map, g);
        const SymMatrix df = eval_F_prime(map, g, d);
        double err[3];
        for (int k = 0; k < 3; ++k) {
          auto gh = g;
          for (std::size_t j = 0; j < n; ++j) gh[j] += kSteps[k] * d[j];
          err[k] = spectral_norm((1.0 / kSteps[k]) * (eval_F(map, gh) - f) - df);
        }
        const double o1 = std::log10(err[0] / err[1]);
        const double o2 = std::log10(err[1] / err[2]);
        const bool ok = o1 >= 0.8 && o1 <= 1.2 && o2 >= 0.8 && o2 <= 1.2;
        record(p, s, ok, "gamma=" + describe(g) + " orders=" + csv_number(o1) + "," + csv_number(o2));
      } catch (const Error& e) {
        record(p, s, false, std::string("evaluation failed: ") + e.what());
      }
    }
    report.properties.push_back(std::move(p));
  }

  const bool have_lambda = criterion && criterion->fulfilled();
  for (const char* name : {"converse_monotonicity", "covering_lower_bound", "uniqueness_order"}) {
    PropertyOutcome p = named_outcome(name);
    if (!have_lambda) {
      p.skipped = true;
      report.properties.push_back(std::move(p));
      continue;
    }
    const double lambda = criterion->lambda;
    const std::string which = name;
    for (std::size_t s = 0; s < samples; ++s) {
      try {
        const CoefficientVector x = uniform_point(rng, bounds);
        if (which == "converse_monotonicity") {
          const CoefficientVector y = uniform_point(rng, bounds);
          record(p, s, converse_monotonicity_check(map, bounds, x, y, lambda),
                 "x=" + describe(x) + " y=" + describe(y));
        } else if (which == "covering_lower_bound") {
          for (std::size_t j = 0; j < n; ++j) {
            const double ev = lambda_max(eval_F_prime(map, x, probe_direction(n, j)));
            record(p, s, ev >= lambda - 1e-9,
                   "x=" + describe(x) + " j=" + std::to_string(j + 1) + " eigenvalue=" + csv_number(ev));
          }
        } else {
          const CoefficientVector other = uniform_point(rng, bounds);
          const bool below = loewner_leq(eval_F(map, other), eval_F(map, x), 0.0);
          const bool ok = !below || other == x || other.sum() > x.sum();
          record(p, s, ok, "xhat=" + describe(x) + " x=" + describe(other));
        }
      } catch (const Error& e) {
        record(p, s, false, std::string("evaluation failed: ") + e.what());
      }
    }
    report.properties.push_back(std::move(p));
  }
  return report;
}

json to_json(const PropertyReport& report) {
  json props = json::array();
  for (const auto& p : report.properties) {
    json e{{"name", p.name},      {"samples", p.samples}, {"passed", p.passed},
           {"failed", p.failed},  {"skipped", p.skipped}};
    if (!p.first_failure.empty()) e["first_failure"] = p.first_failure;
    props.push_back(std::move(e));
  }
  return {{"properties", props}, {"all_passed", report.all_passed()}};
}

int run_criterion(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  json report = base_report("criterion", config);
  const Setup setup = prepare(config);
  report["criterion"] = to_json(setup.criterion);
  report["lambda_floor"] = kLambdaFloor;
  if (setup.sweep) report["sweep"] = sweep_json(*setup.sweep);
  const bool met = setup.criterion.fulfilled();
  report["status"] = met ? "criterion_met" : "criterion_unmet";
  write_report(config, report);
  return met ? kExitOk : kExitCriterionUnmet;
}

int run_reconstruct(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  json report = base_report("reconstruct", config);
  const Setup setup = prepare(config);
  report["criterion"] = to_json(setup.criterion);
  if (setup.sweep) report["sweep"] = sweep_json(*setup.sweep);

  const CoefficientVector truth = resolve_true_gamma(config);
  report["true_gamma"] = to_vector(truth);
  if (!setup.criterion.fulfilled() && !config.force) {
    report["status"] = "criterion_unmet";
    write_report(config, report);
    return kExitCriterionUnmet;
  }

  const std::size_t m = setup.map.num_currents();
  const SymMatrix exact = eval_F(setup.map, truth);
  const SymMatrix noise = noise_matrix(m, config.delta, config.noise_seed);
  const SymMatrix data = exact + noise;
  report["noise"] = {{"delta", config.delta}, {"perturbation_norm", spectral_norm(noise)}};

  ReconstructionResult result;
  try {
    result = solve_noisy(setup.map, config.bounds, data, config.delta, setup.criterion, config.solver);
  } catch (const InfeasibleError& e) {
    report["status"] = "infeasible";
    report["message"] = e.what();
    write_report(config, report);
    return kExitInfeasible;
  } catch (const NonConvergenceError& e) {
    report["status"] = "non_convergence";
    report["message"] = e.what();
    report["best_iterate"] = e.best_iterate();
    write_report(config, report);
    return kExitNonConvergence;
  }

  const double error = max_abs_diff(result.minimizer, truth);
  report["result"] = to_json(result);
  report["error_inf"] = error;
  if (result.certified_error_radius) report["within_certified_radius"] = error <= *result.certified_error_radius;
  report["status"] = "ok";
  write_report(config, report);

  std::ostringstream recon;
  recon << "j,true_gamma,reconstructed,abs_error,certified_radius\n";
  for (std::size_t j = 0; j < truth.size(); ++j) {
    recon << (j + 1) << ',' << csv_number(truth[j]) << ',' << csv_number(result.minimizer[j]) << ','
          << csv_number(std::abs(result.minimizer[j] - truth[j])) << ','
          << (result.certified_error_radius ? csv_number(*result.certified_error_radius) : std::string("nan"))
          << '\n';
  }
  write_text(config.output_dir / "reconstruction.csv", recon.str());

  std::ostringstream trace;
  trace << "iteration,stage,mu,objective,margin\n";
  for (const auto& row : result.trace) {
    trace << row.iteration << ',' << row.outer << ',' << csv_number(row.mu) << ',' << csv_number(row.objective)
          << ',' << csv_number(row.margin) << '\n';
  }
  write_text(config.output_dir / "trace.csv", trace.str());
  return kExitOk;
}

int run_properties(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  json report = base_report("properties", config);
  const Setup setup = prepare(config);
  report["criterion"] = to_json(setup.criterion);
  const PropertyReport props =
      run_property_suite(setup.map, config.bounds, config.samples, config.seed,
                         setup.criterion.fulfilled() ? std::optional(setup.criterion) : std::nullopt);
  report["properties"] = to_json(props);
  report["status"] = props.all_passed() ? "ok" : "property_failure";
  write_report(config, report);
  return props.all_passed() ? kExitOk : kExitPropertyFailure;
}

int run_mesh_dump(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const Mesh mesh = generate_mesh(make_geometry(config), config.mesh_size);
  std::ostringstream out;
  write_mesh(out, mesh);
  write_text(config.output_dir / "mesh.txt", out.str());
  return kExitOk;
}

int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& err) {
  try {
    if (command == "criterion") return run_criterion(config);
    if (command == "reconstruct") return run_reconstruct(config);
    if (command == "properties") return run_properties(config);
    if (command == "mesh-dump") return run_mesh_dump(config);
    err << "unknown command '" << command << "'\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NonConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace robinsdp
