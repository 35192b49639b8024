#include "piola/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "piola/piola.hpp"
#include "piola/random_fields.hpp"
#include "piola/variational.hpp"

namespace piola {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Skip:
      return "skip";
  }
  return "skip";
}

void ResidualReport::finalize() {
  points = static_cast<int>(residuals.size());
  if (points == 0) {
    status = CheckStatus::Skip;
    max_residual = mean_residual = 0.0;
    return;
  }
  max_residual = *std::max_element(residuals.begin(), residuals.end());
  mean_residual = pairwise_sum(residuals) / points;
  const bool finite = std::all_of(residuals.begin(), residuals.end(), [](double r) { return std::isfinite(r); });
  bool ok = false;
  if (floor) {
    ok = finite && *std::min_element(residuals.begin(), residuals.end()) >= tolerance;
  } else {
    ok = finite && max_residual <= tolerance;
  }
  status = ok ? CheckStatus::Pass : CheckStatus::Fail;
  if (!finite) max_residual = mean_residual = INFINITY;
}

bool Report::pass() const {
  return std::none_of(checks.begin(), checks.end(), [](const ResidualReport& r) { return r.status == CheckStatus::Fail; });
}

std::uint64_t effective_seed(const Scenario& s, const RunOptions& options) {
  if (const char* env = std::getenv("PIOLA_SEED"); env != nullptr && *env != '\0') {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ScenarioError(std::string("PIOLA_SEED is not a non-negative integer: '") + env + "'");
    }
  }
  return options.seed.value_or(s.seed);
}

namespace {

constexpr double kEuclideanTolerance = 1e-10;
constexpr double kSlopeTolerance = 0.2;
// Pointwise algebraic identities with no derivative of user data beyond first order.
constexpr double kAlgebraicTolerance = 1e-9;
constexpr double kNegativeControlFloor = 1e-3;
constexpr double kConnectionPerturbation = 0.1;
constexpr int kRandomFieldsMarsdenHughes = 5;
constexpr int kVariations = 5;
constexpr int kWeakFormFields = 10;
constexpr int kDerivativePairs = 100;

std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Context {
  const Scenario& s;
  std::uint64_t seed;
  int points;
  int order;
  Tolerances tol;
  std::vector<VecD> samples;

  Rng rng(std::string_view check) const { return make_rng(seed ^ name_hash(check)); }
  QuadratureRule rule(int n) const { return tensor_gauss_legendre(s.source->box(), n); }
  std::string aspect(const std::string& check, const std::string& a) const { return check + ":" + a; }
};

ResidualReport make(std::string name, double tolerance) {
  ResidualReport r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  return r;
}

std::vector<VectorFieldOnChart> target_fields(const Context& c, Rng& rng, int count) {
  std::vector<VectorFieldOnChart> out;
  const int d = c.s.dim();
  if (c.s.x) out.emplace_back(d, *c.s.x);
  while (static_cast<int>(out.size()) < count) out.emplace_back(d, random_vector_field(c.s.target->box(), rng));
  return out;
}

std::vector<VectorFieldOnChart> source_fields(const Context& c, const std::optional<std::vector<Expr>>& user, Rng& rng,
                                              int count) {
  std::vector<VectorFieldOnChart> out;
  const int d = c.s.dim();
  if (user) out.emplace_back(d, *user);
  while (static_cast<int>(out.size()) < count) out.emplace_back(d, random_vector_field(c.s.source->box(), rng));
  return out;
}

VecD probe_point(const Scenario& s) {
  if (s.probe) return *s.probe;
  const Box& b = s.source->box();
  VecD p(b.dim());
  for (int i = 0; i < b.dim(); ++i) p(i) = 0.5 * (b.bounds[static_cast<std::size_t>(i)].first + b.bounds[static_cast<std::size_t>(i)].second);
  return p;
}

// ---------------------------------------------------------------------------

std::vector<ResidualReport> check_euclidean(const Context& c) {
  const std::string n = "euclidean-piola";
  auto src = std::make_shared<const Chart>(Chart::euclidean(c.s.source->box()));
  auto tgt = std::make_shared<const Chart>(Chart::euclidean(c.s.target->box()));
  const ChartMap map(src, tgt, c.s.map->components());
  auto main = make(n, kEuclideanTolerance);
  auto two = make(c.aspect(n, "coderivative"), c.tol.two_path);
  for (const VecD& p : c.samples) {
    const auto ps = as_span(p);
    const Coderivative div = euclidean_div_cof_at(map, ps);
    main.residuals.push_back(max_abs(div.value) / (1.0 + div.scale));
    const Coderivative delta = coderivative_cof_at(map, ps);
    two.residuals.push_back(max_abs(VecD(delta.value + div.value)) / (1.0 + std::max(div.scale, delta.scale)));
  }
  return {main, two};
}

std::vector<ResidualReport> check_riemannian(const Context& c) {
  const std::string n = "riemannian-piola";
  const ChartMap& map = *c.s.map;
  auto main = make(n, c.tol.pointwise);
  auto two = make(c.aspect(n, "two-path"), c.tol.two_path);
  auto det = make(c.aspect(n, "det-two-path"), c.tol.two_path);
  auto cof = make(c.aspect(n, "cof-coordinate"), c.tol.pointwise);
  for (const VecD& p : c.samples) {
    const auto ps = as_span(p);
    const Coderivative delta = coderivative_cof_at(map, ps);
    main.residuals.push_back(max_abs(delta.value) / (1.0 + delta.scale));
    const VecD frame = coderivative_cof_frame_at(map, ps);
    two.residuals.push_back(max_abs(VecD(delta.value - frame)) / (1.0 + delta.scale));
    const double d1 = det_df_at(map, ps);
    const double d2 = coordinate_det_df_at(map, ps);
    det.residuals.push_back(std::abs(d1 - d2) / (1.0 + std::abs(d1)));
    cof.residuals.push_back(coordinate_cof_identity_residual(map, ps) / (1.0 + max_abs(cof_df_at(map, ps))));
  }
  return {main, two, det, cof};
}

std::vector<ResidualReport> check_marsden_hughes(const Context& c) {
  const std::string n = "marsden-hughes";
  const ChartMap& map = *c.s.map;
  Rng rng = c.rng(n);
  const auto fields = target_fields(c, rng, kRandomFieldsMarsdenHughes);
  auto main = make(n, c.tol.pointwise);
  auto piola = make(c.aspect(n, "piola-two-path"), c.tol.pointwise);
  auto div = make(c.aspect(n, "divergence-two-path"), c.tol.two_path);
  for (const auto& x : fields) {
    for (const VecD& p : c.samples) {
      const auto ps = as_span(p);
      const PointResidual r = residual_marsden_hughes(map, x, ps);
      if (r.skipped) {
        ++main.skipped;
        ++piola.skipped;
        continue;
      }
      main.residuals.push_back(r.residual);
      const VecD a = piola_transform_at(map, x, ps);
      const VecD b = piola_transform_inverse_form_at(map, x, ps);
      piola.residuals.push_back(max_abs(VecD(a - b)) / (1.0 + max_abs(a)));
      const FieldJet jet = piola_transform_jet(map, x, point_state(map, ps));
      const double v1 = divergence_volume_form(map.source(), ps, jet);
      const double v2 = divergence_christoffel_form(map.source(), ps, jet);
      div.residuals.push_back(std::abs(v1 - v2) / (1.0 + std::max(std::abs(v1), max_abs(jet.jacobian))));
    }
  }
  if (main.residuals.empty()) main.note = "every sample point failed the diffeomorphism guard";
  return {main, piola, div};
}

std::vector<ResidualReport> check_generalized(const Context& c) {
  const std::string n = "generalized";
  const ChartMap& map = *c.s.map;
  Rng rng = c.rng("marsden-hughes");  // same fields as the diffeomorphism-only check
  const auto fields = target_fields(c, rng, kRandomFieldsMarsdenHughes);
  auto main = make(n, c.tol.pointwise);
  for (const auto& x : fields)
    for (const VecD& p : c.samples) main.residuals.push_back(residual_generalized(map, x, as_span(p)).residual);
  return {main};
}

std::vector<ResidualReport> check_coordinate(const Context& c) {
  const std::string n = "coordinate";
  const ChartMap& map = *c.s.map;
  auto full = make(c.aspect(n, "full"), c.tol.pointwise);
  auto simple = make(c.aspect(n, "simplified"), c.tol.pointwise);
  auto gap = make(c.aspect(n, "gap"), c.tol.pointwise);
  auto trace = make(c.aspect(n, "christoffel-trace"), c.tol.two_path);
  for (const VecD& p : c.samples) {
    const auto ps = as_span(p);
    const CoordinateResidual r = residual_coordinate(map, ps);
    const double scale = 1.0 + r.scale;
    full.residuals.push_back(max_abs(r.full) / scale);
    simple.residuals.push_back(max_abs(r.simplified) / scale);
    gap.residuals.push_back(max_abs(VecD(r.full + r.simplified)) / scale);
    trace.residuals.push_back(christoffel_trace_residual(map.target(), as_span(map.jet(ps, 0).value)));
  }
  return {full, simple, gap, trace};
}

std::vector<ResidualReport> check_mh83(const Context& c) {
  const std::string n = "mh83-negative";
  const ChartMap& map = *c.s.map;
  const VecD p = probe_point(c.s);
  auto published = make(n, c.s.mh83_floor);
  published.floor = true;
  published.residuals.push_back(max_abs(residual_mh83_published(map, as_span(p))));
  auto corrected = make(c.aspect(n, "corrected"), c.tol.pointwise);
  const CoordinateResidual r = residual_coordinate(map, as_span(p));
  corrected.residuals.push_back(max_abs(r.full) / (1.0 + r.scale));
  return {published, corrected};
}

/// A = I + trigonometric perturbation; G_E, G_F = I + L Lᵀ with L affine
/// (or constant for a flat bundle).
SyntheticBundle synthetic_bundle(const Box& box, Rng& rng, bool flat) {
  const int d = box.dim();
  std::vector<std::vector<Expr>> a(static_cast<std::size_t>(d), std::vector<Expr>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          Expr::constant(i == j ? 1.0 : 0.0) + random_trig(box, 2, 0.4, rng);
  auto gram = [&]() {
    std::vector<std::vector<Expr>> l(static_cast<std::size_t>(d), std::vector<Expr>(static_cast<std::size_t>(d)));
    for (auto& row : l)
      for (auto& e : row) e = flat ? Expr::constant(uniform(rng, -0.6, 0.6)) : random_polynomial(box, 1, 0.3, rng);
    std::vector<std::vector<Expr>> g(static_cast<std::size_t>(d), std::vector<Expr>(static_cast<std::size_t>(d)));
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        Expr s = Expr::constant(i == j ? 1.0 : 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) s = s + l[i][k] * l[j][k];
        g[i][j] = s;
      }
    }
    return g;
  };
  auto ge = gram();
  auto gf = gram();
  return SyntheticBundle(d, std::move(a), std::move(ge), std::move(gf));
}

std::vector<ResidualReport> check_cof_derivative(const Context& c) {
  const std::string n = "cof-derivative";
  const ChartMap& map = *c.s.map;
  const int d = c.s.dim();
  Rng rng = c.rng(n);
  auto main = make(n, kAlgebraicTolerance);
  auto synth = make(c.aspect(n, "synthetic"), c.tol.pointwise);
  auto slope = make(c.aspect(n, "fd-slope"), kSlopeTolerance);
  const SyntheticBundle bundle = synthetic_bundle(c.s.source->box(), rng, false);
  const int pairs = std::min<int>(kDerivativePairs, static_cast<int>(c.samples.size()));
  for (int i = 0; i < pairs; ++i) {
    const auto ps = as_span(c.samples[static_cast<std::size_t>(i)]);
    const VecD x = random_vector(d, rng);
    main.residuals.push_back(cof_derivative_residual(df_bundle_jet(map, ps, x)).residual);
    synth.residuals.push_back(cof_derivative_residual(bundle.jet(ps, x)).residual);
  }
  const SyntheticBundle flat = synthetic_bundle(c.s.source->box(), rng, true);
  const VecD p = probe_point(c.s);
  VecD x = random_vector(d, rng);
  x /= x.norm();
  const FdSlopeResult fd = fd_slope_check(flat, as_span(p), x, {1e-2, 1e-3, 1e-4});
  slope.residuals.push_back(std::abs(fd.slope - 2.0));
  std::ostringstream note;
  note.precision(4);
  note << "fitted slope " << fd.slope;
  slope.note = note.str();
  return {main, synth, slope};
}

std::vector<ResidualReport> check_hodge(const Context& c) {
  const std::string n = "hodge-parallel";
  const Chart& chart = *c.s.source;
  const int d = chart.dim();
  Rng rng = c.rng(n);
  auto main = make(n, kAlgebraicTolerance);
  auto control = make(c.aspect(n, "negative-control"), kNegativeControlFloor);
  control.floor = true;
  for (int k = 0; k <= d; ++k) {
    std::vector<Expr> beta;
    for (int i = 0; i < binomial(d, k); ++i) beta.push_back(random_polynomial(chart.box(), 2, 0.5, rng));
    const int count = std::min<int>(50, static_cast<int>(c.samples.size()));
    for (int i = 0; i < count; ++i) {
      const VecD x = random_vector(d, rng);
      main.residuals.push_back(hodge_parallel_residual(chart, as_span(c.samples[static_cast<std::size_t>(i)]), x, k, beta));
    }
  }
  if (d >= 2) {
    // Constant β = Σ e_i and X with X^0 = 1: the perturbed Γ^0_00 enters at full strength.
    const std::vector<Expr> beta(static_cast<std::size_t>(d), Expr::constant(1.0));
    VecD x = VecD::Constant(d, 0.5);
    x(0) = 1.0;
    const ConnectionPerturbation perturb{0, 0, 0, kConnectionPerturbation};
    const int count = std::min<int>(20, static_cast<int>(c.samples.size()));
    for (int i = 0; i < count; ++i)
      control.residuals.push_back(
          hodge_parallel_residual(chart, as_span(c.samples[static_cast<std::size_t>(i)]), x, 1, beta, perturb));
  }
  return {main, control};
}

constexpr double kRoundingFloor = 1e-14;

/// Largest step-to-step increase of |first variation| over the order sweep;
/// increases among values below the rounding floor are ignored.
double monotone_violation(const std::vector<double>& sweep, double floor) {
  double worst = 0.0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    worst = std::max(worst, sweep[i] - std::max(sweep[i - 1], floor));
  return worst;
}

std::vector<ResidualReport> check_null_lagrangian(const Context& c) {
  const std::string n = "null-lagrangian";
  Rng rng = c.rng(n);
  const auto fields = source_fields(c, c.s.v, rng, kVariations);
  auto main = make(n, c.tol.integral);
  auto energy_t = make(c.aspect(n, "energy-constancy"), c.tol.integral);
  auto fd = make(c.aspect(n, "fd-agreement"), c.tol.fd);
  auto mono = make(c.aspect(n, "order-monotone"), 0.0);
  const QuadratureRule rule = c.rule(c.order);
  std::vector<QuadratureRule> sweep_rules;
  for (int q = 12; q <= 20; q += 2) sweep_rules.push_back(c.rule(q));
  for (const auto& v : fields) {
    const Variation var(c.s.map, v);
    var.validate();
    const double fv = first_variation(var, rule);
    main.residuals.push_back(std::abs(fv));
    double worst = 0.0;
    for (double e : energy_along_variation(var, rule, 9)) worst = std::max(worst, std::abs(e));
    energy_t.residuals.push_back(worst);
    fd.residuals.push_back(std::abs(fv - first_variation_fd(var, rule, c.s.fd_step)));
    std::vector<double> sweep;
    for (const auto& r : sweep_rules) sweep.push_back(std::abs(first_variation(var, r)));
    mono.residuals.push_back(monotone_violation(sweep, kRoundingFloor));
    if (mono.note.empty()) {
      std::ostringstream note;
      note.precision(3);
      note << "orders 12..20:";
      for (double r : sweep) note << " " << r;
      mono.note = note.str();
    }
  }
  return {main, energy_t, fd, mono};
}

std::vector<ResidualReport> check_weak_form(const Context& c) {
  const std::string n = "weak-form";
  Rng rng = c.rng(n);
  const auto fields = source_fields(c, c.s.xi, rng, kWeakFormFields);
  auto main = make(n, c.tol.integral);
  auto adj = make(c.aspect(n, "adjointness"), c.tol.adjointness);
  const QuadratureRule rule = c.rule(c.order);
  for (const auto& f : fields) {
    const LocalizedField xi(f, Bump(c.s.source->box()));
    const WeakFormResult r = weak_form_residual(*c.s.map, xi, rule);
    main.residuals.push_back(r.residual());
    adj.residuals.push_back(r.gap());
  }
  return {main, adj};
}

std::vector<ResidualReport> check_boundary(const Context& c) {
  const std::string n = "boundary-dependence";
  auto main = make(n, c.tol.boundary);
  if (!c.s.target->is_cartesian()) {
    main.note = "requires a Cartesian Euclidean target metric";
    return {main};
  }
  Rng rng = c.rng(n);
  const auto fields = source_fields(c, c.s.w, rng, 1);
  auto w = std::make_shared<const LocalizedField>(fields.front(), Bump(c.s.source->box()));
  const QuadratureRule rule = c.rule(c.order);
  const double e0 = energy(*c.s.map, rule);
  const double base = 0.05 * c.s.target->box().min_side();
  for (double factor : {1.0, 2.0, 5.0, 10.0}) {
    const PerturbedMap g(c.s.map, w, base * factor);
    main.residuals.push_back(std::abs(energy(g, rule) - e0));
  }
  return {main};
}

using CheckFn = std::function<std::vector<ResidualReport>(const Context&)>;

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> r = {
      {"euclidean-piola", check_euclidean},   {"riemannian-piola", check_riemannian},
      {"marsden-hughes", check_marsden_hughes}, {"generalized", check_generalized},
      {"coordinate", check_coordinate},       {"mh83-negative", check_mh83},
      {"cof-derivative", check_cof_derivative}, {"hodge-parallel", check_hodge},
      {"null-lagrangian", check_null_lagrangian}, {"weak-form", check_weak_form},
      {"boundary-dependence", check_boundary},
  };
  return r;
}

}  // namespace

Report run(const Scenario& scenario, const RunOptions& options) {
  Report report;
  report.scenario = scenario.name;
  report.seed = effective_seed(scenario, options);
  report.points = options.points.value_or(scenario.sample_count);
  report.quadrature_order = options.quadrature_order.value_or(scenario.quadrature_order);
  report.tolerances = scenario.tolerances;
  if (options.pointwise_tolerance) report.tolerances.pointwise = *options.pointwise_tolerance;

  const Context ctx{scenario,
                    report.seed,
                    report.points,
                    report.quadrature_order,
                    report.tolerances,
                    halton_points(scenario.source->box(), report.points, report.seed)};

  for (const std::string& name : known_checks()) {
    if (std::find(scenario.checks.begin(), scenario.checks.end(), name) == scenario.checks.end()) continue;
    try {
      for (ResidualReport& r : registry().at(name)(ctx)) {
        r.finalize();
        report.checks.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      ResidualReport r = make(name, 0.0);
      r.status = CheckStatus::Fail;
      r.note = std::string("error: ") + e.what();
      report.checks.push_back(std::move(r));
    }
  }
  return report;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::string render(const Report& report, Format format) {
  if (format == Format::Json) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& r : report.checks) {
      nlohmann::json c = {{"name", r.name},
                          {"status", to_string(r.status)},
                          {"max_residual", number_or_null(r.max_residual)},
                          {"mean_residual", number_or_null(r.mean_residual)},
                          {"tolerance", r.tolerance},
                          {"points", r.points},
                          {"skipped", r.skipped},
                          {"kind", r.floor ? "floor" : "ceiling"}};
      if (!r.note.empty()) c["note"] = r.note;
      checks.push_back(std::move(c));
    }
    const Tolerances& t = report.tolerances;
    nlohmann::json out = {
        {"schema", 1},
        {"scenario", report.scenario},
        {"seed", report.seed},
        {"checks", std::move(checks)},
        {"verdict", report.pass() ? "pass" : "fail"},
        {"environment",
         {{"points", report.points},
          {"quadrature_order", report.quadrature_order},
          {"tolerances",
           {{"pointwise", t.pointwise},
            {"integral", t.integral},
            {"fd", t.fd},
            {"two_path", t.two_path},
            {"adjointness", t.adjointness},
            {"boundary", t.boundary}}}}},
    };
    return out.dump();
  }

  std::ostringstream os;
  os << "scenario " << report.scenario << "  seed " << report.seed << "  points " << report.points
     << "  quadrature order " << report.quadrature_order << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %-38s %-6s %-11s %-11s %-12s %s\n", "check", "status", "max", "mean", "tolerance",
                "points");
  os << line;
  for (const auto& r : report.checks) {
    const std::string tol = (r.floor ? ">= " : "<= ") + sci(r.tolerance);
    std::snprintf(line, sizeof line, "  %-38s %-6s %-11s %-11s %-12s %d", r.name.c_str(), to_string(r.status).c_str(),
                  sci(r.max_residual).c_str(), sci(r.mean_residual).c_str(), tol.c_str(), r.points);
    os << line;
    if (r.skipped > 0) os << " (" << r.skipped << " skipped)";
    if (!r.note.empty()) os << "  " << r.note;
    os << "\n";
  }
  os << "verdict: " << (report.pass() ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace piola
