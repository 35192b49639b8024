#pragma once

// Runs the checks a scenario requests and renders the resulting report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "piola/scenario.hpp"

namespace piola {

enum class CheckStatus { Pass, Fail, Skip };

std::string to_string(CheckStatus s);

/// Residuals of one check (or one aspect "check:aspect" of it).
struct ResidualReport {
  std::string name;
  CheckStatus status = CheckStatus::Skip;
  std::vector<double> residuals;  // one per evaluated point / field / variation
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  int points = 0;
  int skipped = 0;
  /// Negative controls pass when every residual is at least `tolerance`.
  bool floor = false;
  std::string note;

  /// Computes max, mean, points and status from `residuals`.
  void finalize();
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  int points = 0;
  int quadrature_order = 0;
  Tolerances tolerances;
  std::vector<ResidualReport> checks;
  bool pass() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  std::optional<int> quadrature_order;
  std::optional<double> pointwise_tolerance;
};

/// Seed precedence: PIOLA_SEED environment variable, then options.seed,
/// then the scenario's own seed.
std::uint64_t effective_seed(const Scenario& s, const RunOptions& options);

Report run(const Scenario& scenario, const RunOptions& options = {});

enum class Format { Text, Json };
/// JSON output has sorted keys and a fixed layout, so identical reports
/// render to identical bytes.
std::string render(const Report& report, Format format);

}  // namespace piola
