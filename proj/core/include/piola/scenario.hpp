#pragma once

// Scenario files: two charts, a map between them, optional fields, and the
// list of checks to run with their tolerances.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "piola/chart.hpp"

namespace piola {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double pointwise = 1e-8;    // normalized pointwise residuals
  double integral = 1e-6;     // quadrature-based checks
  double fd = 1e-5;           // finite-difference oracle agreement
  double two_path = 1e-10;    // agreement of independent formulas
  double adjointness = 1e-8;  // ∫⟨∇ξ, ω⟩ vs ∫⟨ξ, δω⟩
  double boundary = 1e-7;     // |E(f) − E(g)| for boundary-fixed g
};

struct Scenario {
  std::string name;
  std::shared_ptr<const Chart> source;
  std::shared_ptr<const Chart> target;
  std::shared_ptr<const ChartMap> map;
  // Optional user fields. X lives on the target chart; xi, V and W are
  // functions of source coordinates with target components.
  std::optional<std::vector<Expr>> x, xi, v, w;
  std::vector<std::string> checks;
  Tolerances tolerances;
  int sample_count = 200;
  std::uint64_t seed = 0;
  int quadrature_order = 16;
  double fd_step = 1e-3;
  std::optional<VecD> probe;
  double mh83_floor = 0.1;

  int dim() const { return source->dim(); }
};

/// Every check name a scenario may request, in canonical run order.
const std::vector<std::string>& known_checks();

/// Parses and validates scenario JSON. Errors name the offending field path,
/// the parse offset, or the sampled point.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::string& path);

struct BuiltinScenario {
  std::string_view name;
  std::string_view json;
};
/// Scenario fixtures compiled into the library.
const std::vector<BuiltinScenario>& builtin_scenarios();
Scenario load_builtin(std::string_view name);

}  // namespace piola
