#pragma once

#include <optional>

#include "ckit/io.hpp"

namespace ckit {

struct ScenarioReport {
  json machine;
  int passed = 0;
  int failed = 0;
  bool structural = false;
  std::string error;

  int exit_code() const { return structural ? 2 : (failed ? 1 : 0); }
  std::string human() const;
};

/// Executes a scenario document: declarations first (with invariant checks),
/// then the commands in order. Deterministic given the seed.
ScenarioReport run_scenario(const json& doc, const std::string& name,
                            std::optional<double> tol_override = std::nullopt,
                            std::optional<uint64_t> seed_override = std::nullopt);
ScenarioReport run_scenario_file(const std::string& path,
                                 std::optional<double> tol_override = std::nullopt,
                                 std::optional<uint64_t> seed_override = std::nullopt);

struct SweepConfig {
  int k_max = 3;
  int dims_max = 3;
  int mu_max = 2;
  uint64_t seed = 0;
  long long limit = -1;  // subsample cap, -1 = exhaustive
  bool heavy_checks = true;  // double commutant on every instance
};

struct SweepReport {
  json machine;
  long long instances = 0;
  long long failures = 0;
  std::string hash;
  int exit_code() const { return failures ? 1 : 0; }
};

/// Exhaustive duality sweep: for every multiplicity matrix within bounds
/// (no zero rows or columns) checks the transpose law, the equality of the
/// representation and endomorphism existence decisions, the double commutant
/// and the Morita shadow of the fixed-vector criterion.
SweepReport run_sweep(const SweepConfig& cfg);

}  // namespace ckit
