#pragma once

// Command dispatch for the chargedamp executable, kept in a library so tests can
// drive it without spawning processes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chargedamp/acceptance.hpp"
#include "chargedamp/classical_direct.hpp"
#include "chargedamp/quantum.hpp"

namespace chargedamp::app {

enum ExitCode : int { ok = 0, validation_failure = 1, solver_failure = 2, verification_failure = 3 };

struct RunRequest {
  std::string command;  ///< simulate-classical | simulate-canonical | simulate-packet | green-check | compare | verify
  std::optional<std::filesystem::path> scenario_path;  ///< verify falls back to the built-in GaAs scenario
  std::filesystem::path output_dir = "chargedamp_out";
  std::vector<std::string> overrides;  ///< section.key=value
  std::vector<double> times;           ///< packet / green-check sample times; empty picks defaults
  std::size_t grid_points = 101;       ///< per axis, packet snapshots
  bool binary_density = false;
  unsigned threads = 1;
};

struct RunReport {
  std::string command;
  double wall_time = 0.0;
  std::vector<std::filesystem::path> outputs;
  std::vector<Check> checks;
  std::vector<std::string> log;  ///< human-readable lines for stdout

  bool all_passed() const;
};

std::vector<std::string> commands();

/// Throws ConfigError/ValidationError (exit 1) or SolverError, DomainError,
/// SingularTimeError, QuadratureError (exit 2). run_report.json is always the last output.
RunReport run(const RunRequest& request);

/// Maps an exception escaping run() to the process exit code and a one-line message.
int exit_code_for(const std::exception& e);

struct FigureInputs {
  Trajectory newtonian;
  Trajectory ltdmm;
  std::vector<Vec2> packet_center;           ///< aligned with ltdmm
  std::vector<Vec2> packet_center_velocity;  ///< aligned with ltdmm
};

/// fig1.csv (positions per model and packet centre), fig2.csv (velocity plane per
/// model and packet centre), fig3.csv (Newtonian velocities over time), fig4.csv
/// (variable-mass velocities over time with packet-centre velocities).
std::vector<std::filesystem::path> emit_figure_data(const std::filesystem::path& dir, const FigureInputs& in);

}  // namespace chargedamp::app
