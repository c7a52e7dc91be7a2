#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "chargedamp/app.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace chargedamp;
  CLI::App cli{"Charged-particle dynamics with time-dependent mass: classical, canonical and quantum solvers"};
  cli.require_subcommand(1);

  app::RunRequest req;
  std::string scenario;
  std::string output_dir = env_or("CHARGEDAMP_OUTPUT_DIR", req.output_dir.string());
  unsigned threads = 1;
  try {
    threads = static_cast<unsigned>(std::stoul(env_or("CHARGEDAMP_THREADS", "1")));
  } catch (const std::exception&) {
    std::cerr << "error: CHARGEDAMP_THREADS must be a positive integer\n";
    return app::validation_failure;
  }

  for (const auto& name : app::commands()) {
    auto* sub = cli.add_subcommand(name);
    auto* opt = sub->add_option("scenario", scenario, "scenario file")->check(CLI::ExistingFile);
    if (name != "verify") opt->required();
    sub->add_option("-o,--output-dir", output_dir, "output directory (env CHARGEDAMP_OUTPUT_DIR)");
    sub->add_option("-s,--set", req.overrides, "override, section.key=value")->take_all();
    sub->add_option("-j,--threads", threads, "worker threads (env CHARGEDAMP_THREADS)")->check(CLI::PositiveNumber);
    if (name == "simulate-packet" || name == "green-check") {
      sub->add_option("-t,--times", req.times, "sample times, s")->delimiter(',');
    }
    if (name == "simulate-packet") {
      sub->add_option("-n,--grid", req.grid_points, "density grid points per axis")->check(CLI::Range(2, 100000));
      sub->add_flag("--binary", req.binary_density, "write densities as float64 binary");
    }
    sub->callback([&req, name] { req.command = name; });
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : app::validation_failure;
  }
  if (!scenario.empty()) req.scenario_path = scenario;
  req.output_dir = output_dir;
  req.threads = threads;

  try {
    const auto report = app::run(req);
    for (const auto& line : report.log) std::cout << line << '\n';
    if (req.command != "verify") {
      for (const auto& c : report.checks) {
        std::cout << fmt::format("[{}] {} = {:.3g} (tol {:.3g})\n", c.passed ? "PASS" : "FAIL", c.name, c.measured,
                                 c.tolerance);
      }
    }
    std::cout << fmt::format("{} output file(s) in {}\n", report.outputs.size(), req.output_dir.string());
    return report.all_passed() ? app::ok : app::verification_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return app::exit_code_for(e);
  }
}
