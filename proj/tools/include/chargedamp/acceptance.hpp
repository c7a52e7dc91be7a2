#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chargedamp/scenario.hpp"

namespace chargedamp {

/// One measured quantity against an explicit tolerance.
struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double runtime = 0.0;         ///< s
  double runtime_budget = 0.0;  ///< s
  std::string error;            ///< non-empty if the criterion threw

  bool passed() const;
  std::string summary_line() const;
};

struct AcceptanceOptions {
  Scenario gaas = gaas_scenario();  ///< base scenario for every criterion
  std::vector<int> only;            ///< empty runs all twelve
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

}  // namespace chargedamp
