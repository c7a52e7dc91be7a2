#pragma once

// Scenario files: INI-style sections [particle] [mass_model] [fields] [packet]
// [integration], one `key = value` per line, ';' or '#' comments. SI units.
//
//   [particle]      charge, position = "x, y", velocity = "vx, vy"
//   [mass_model]    kind = constant|kanai_caldirola|linear|log_interp, m0, tau, k
//   [fields]        B0, kappa0, and profiles f, Ex, Ey, g written as
//                   "constant c" | "exponential scale tau" |
//                   "sinusoidal offset amplitude angular_frequency phase" |
//                   "linear_ramp offset slope"
//   [packet]        width
//   [integration]   t_start, t_end, output_stride, method = rk45|rk4,
//                   rel_tol, abs_tol, max_step, fixed_step
//
// Overrides are "section.key=value" strings applied on top of the file.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chargedamp/scenario.hpp"

namespace chargedamp {

/// Throws ConfigError naming the key (and line, when known) on any problem.
Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides = {});

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Every number in 17 significant digits, so parse_scenario(format_scenario(s)) == s bit for bit.
std::string format_scenario(const Scenario& s);

void save_scenario(const std::filesystem::path& path, const Scenario& s);

}  // namespace chargedamp
