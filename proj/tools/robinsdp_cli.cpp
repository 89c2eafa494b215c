// Command line front end: robinsdp <criterion|reconstruct|properties|mesh-dump> [--config file] [overrides]

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "robinsdp/errors.hpp"
#include "robinsdp/experiment.hpp"
#include "robinsdp/kernels.hpp"

namespace {

using nlohmann::json;

// flag name -> config key; values are parsed as JSON literals
const std::map<std::string, std::string> kNumericFlags = {
    {"--a", "a"},
    {"--b", "b"},
    {"--n", "n"},
    {"--interface-radius", "interface_radius"},
    {"--segments-per-arc", "segments_per_arc"},
    {"--mesh-size", "mesh_size"},
    {"--m", "m"},
    {"--m-max", "m_max"},
    {"--gamma-seed", "gamma_seed"},
    {"--delta", "delta"},
    {"--noise-seed", "noise_seed"},
    {"--opt-tol", "opt_tol"},
    {"--feas-tol", "feas_tol"},
    {"--max-newton", "max_newton"},
    {"--mu-factor", "mu_factor"},
    {"--samples", "samples"},
    {"--seed", "seed"},
};

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> numeric;
  std::string true_gamma;
  std::string output_dir;
  bool force = false;
  std::string simd;
};

void add_options(CLI::App& sub, Overrides& o) {
  sub.add_option("--config", o.config_path, "JSON config file");
  for (const auto& [flag, key] : kNumericFlags) sub.add_option(flag, o.numeric[key], "overrides '" + key + "'");
  sub.add_option("--true-gamma", o.true_gamma, "comma separated values or 'random'");
  sub.add_option("--output-dir", o.output_dir, "directory for report files");
  sub.add_flag("--force", o.force, "reconstruct even when the criterion is unmet");
  sub.add_option("--simd", o.simd, "kernel set: auto, scalar or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
}

json parse_literal(const std::string& key, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    throw robinsdp::ValidationError("cannot parse value '" + text + "' for " + key);
  }
}

robinsdp::ExperimentConfig resolve(const CLI::App& sub, const Overrides& o) {
  json j = json::object();
  if (!o.config_path.empty()) {
    const robinsdp::ExperimentConfig base = robinsdp::load_config(o.config_path);
    j = robinsdp::to_json(base);
    // keep opt_tol unset so it still follows n and b after overrides
    if (!base.solver.opt_tol) j.erase("opt_tol");
  }
  for (const auto& [flag, key] : kNumericFlags) {
    if (sub.count(flag) > 0) j[key] = parse_literal(key, o.numeric.at(key));
  }
  if (sub.count("--true-gamma") > 0) {
    j["true_gamma"] = o.true_gamma == "random" ? json("random") : parse_literal("true_gamma", "[" + o.true_gamma + "]");
  }
  if (sub.count("--output-dir") > 0) j["output_dir"] = o.output_dir;
  if (o.force) j["force"] = true;
  return robinsdp::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin coefficient reconstruction from boundary measurements"};
  app.require_subcommand(1);
  Overrides overrides;
  const std::pair<const char*, const char*> commands[] = {
      {"criterion", "sweep the measurement count and evaluate the uniqueness criterion"},
      {"reconstruct", "synthesize data for a true coefficient and solve the convex program"},
      {"properties", "sampled monotonicity, convexity and derivative checks"},
      {"mesh-dump", "write the generated mesh"},
  };
  for (const auto& [name, help] : commands) add_options(*app.add_subcommand(name, help), overrides);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return robinsdp::kExitValidation;
  }

  const CLI::App* sub = app.get_subcommands().front();
  try {
    if (!overrides.simd.empty() && overrides.simd != "auto") {
      robinsdp::kernels::select(overrides.simd == "avx2" ? robinsdp::kernels::Isa::avx2
                                                         : robinsdp::kernels::Isa::scalar);
    }
    const robinsdp::ExperimentConfig config = resolve(*sub, overrides);
    const int code = robinsdp::run_command(sub->get_name(), config, std::cerr);
    std::cout << sub->get_name() << ": exit " << code << ", output in " << config.output_dir.string() << '\n';
    return code;
  } catch (const robinsdp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return robinsdp::kExitValidation;
  }
}
