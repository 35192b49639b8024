// verify: run identity checks on scenario files and print a report.
//
// Exit status: 0 every check passed, 1 some check failed, 2 the command line
// or a scenario could not be loaded.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "piola/runner.hpp"
#include "piola/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of Piola-type identities on scenario files."};
  std::vector<std::string> files;
  std::vector<std::string> builtins;
  std::string format = "text";
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  std::optional<int> quad_order;
  std::optional<double> tolerance;
  bool list_checks = false;
  bool list_builtins = false;

  app.add_option("scenarios", files, "Scenario JSON files");
  app.add_option("--builtin", builtins, "Run a built-in scenario by name (repeatable)");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", seed, "Sampling seed (PIOLA_SEED overrides)");
  app.add_option("--points", points, "Number of sample points")->check(CLI::PositiveNumber);
  app.add_option("--quad-order", quad_order, "Gauss-Legendre points per axis")->check(CLI::Range(1, 64));
  app.add_option("--tolerance", tolerance, "Pointwise tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--list-checks", list_checks, "List check names and exit");
  app.add_flag("--list-builtins", list_builtins, "List built-in scenarios and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (list_checks || list_builtins) {
    if (list_checks)
      for (const auto& c : piola::known_checks()) std::cout << c << "\n";
    if (list_builtins)
      for (const auto& b : piola::builtin_scenarios()) std::cout << b.name << "\n";
    return 0;
  }
  if (files.empty() && builtins.empty()) {
    std::cerr << "verify: no scenario given (pass a file or --builtin <name>)\n";
    return 2;
  }

  std::vector<piola::Scenario> scenarios;
  try {
    for (const auto& f : files) scenarios.push_back(piola::load_scenario(f));
    for (const auto& b : builtins) scenarios.push_back(piola::load_builtin(b));
  } catch (const std::exception& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return 2;
  }

  piola::RunOptions options;
  options.seed = seed;
  options.points = points;
  options.quadrature_order = quad_order;
  options.pointwise_tolerance = tolerance;
  const auto fmt = format == "json" ? piola::Format::Json : piola::Format::Text;

  bool all_pass = true;
  for (const auto& s : scenarios) {
    piola::Report report;
    try {
      report = piola::run(s, options);
    } catch (const std::exception& e) {
      std::cerr << "verify: " << e.what() << "\n";
      return 2;
    }
    // JSON output is one report per line.
    std::cout << piola::render(report, fmt) << (fmt == piola::Format::Json ? "\n" : "");
    all_pass = all_pass && report.pass();
  }
  return all_pass ? 0 : 1;
}
