#pragma once

// Experiment pipeline behind the command line tool: setup, criterion sweep,
// data synthesis, reconstruction, property checks and report files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robinsdp/coefficients.hpp"
#include "robinsdp/criterion.hpp"
#include "robinsdp/fem_forward.hpp"
#include "robinsdp/sdp_solver.hpp"

namespace robinsdp {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitCriterionUnmet = 2,
  kExitInfeasible = 3,
  kExitNonConvergence = 4,
  kExitPropertyFailure = 5,
};

struct ExperimentConfig {
  BoxBounds bounds{1.0, 2.0, 2};
  double interface_radius = 0.5;
  std::size_t segments_per_arc = 8;
  double mesh_size = 0.05;
  std::optional<std::size_t> m;  // fixed measurement count; otherwise sweep up to m_max
  std::size_t m_max = 40;
  std::optional<CoefficientVector> true_gamma;  // empty: draw uniformly from the box
  std::uint64_t gamma_seed = 1;
  double delta = 0.0;
  std::uint64_t noise_seed = 7;
  SolverOptions solver;
  std::size_t samples = 200;
  std::uint64_t seed = 3;
  std::filesystem::path output_dir = ".";
  bool force = false;

  /// Throws ValidationError.
  void validate() const;
};

/// Unknown keys and wrongly typed values raise ValidationError.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Every field with defaults filled in.
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

Geometry make_geometry(const ExperimentConfig& config);

/// gamma drawn with gamma_seed, or the explicit true_gamma.
CoefficientVector resolve_true_gamma(const ExperimentConfig& config);

/// Symmetric Gaussian matrix (G + G^T)/2 rescaled to spectral norm delta.
SymMatrix noise_matrix(std::size_t m, double delta, std::uint64_t seed);

struct PropertyOutcome {
  std::string name;
  std::size_t samples = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  bool skipped = false;
  std::string first_failure;
};

struct PropertyReport {
  std::vector<PropertyOutcome> properties;
  bool all_passed() const;
};

/// Sampled monotonicity, convexity, derivative, converse-monotonicity and
/// covering checks. The criterion-dependent ones are skipped unless
/// `criterion` is fulfilled.
PropertyReport run_property_suite(const DiscreteForwardMap& map, const BoxBounds& bounds, std::size_t samples,
                                  std::uint64_t seed, const std::optional<CriterionData>& criterion);

nlohmann::json to_json(const PropertyReport& report);

/// Each writes its files into config.output_dir and returns an exit code.
int run_criterion(const ExperimentConfig& config);
int run_reconstruct(const ExperimentConfig& config);
int run_properties(const ExperimentConfig& config);
int run_mesh_dump(const ExperimentConfig& config);

/// Dispatches a subcommand by name and maps library errors to exit codes,
/// printing the message to `err`.
int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& err);

}  // namespace robinsdp
