#include <doctest.h>

#include <array>
#include <cmath>

#include "piola/random_fields.hpp"
#include "piola/variational.hpp"
#include "support.hpp"

using namespace piola;
using namespace piola::test;

namespace {

const char* kSphere = "4/(1 + x0^2 + x1^2)^2";

std::shared_ptr<const ChartMap> sphere_map() {
  auto src = chart(Box::cube(2, -1, 1), {{kSphere, "0"}, {"0", kSphere}});
  auto tgt = chart(Box::cube(2, -2, 2), {{kSphere, "0"}, {"0", kSphere}});
  return map(src, tgt, {"x0 + 0.2*x1^2", "x1 + 0.3*sin(x0)"});
}

}  // namespace

TEST_CASE("energies of linear maps") {
  auto src = euclidean(Box::cube(2, 0, 1));
  auto tgt = euclidean(Box::cube(2, -1, 3));
  const QuadratureRule rule = tensor_gauss_legendre(src->box(), 4);
  CHECK(energy(*map(src, tgt, {"2*x0", "2*x1"}), rule) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(energy(*map(src, tgt, {"x1", "x0"}), rule) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(energy(*map(src, tgt, {"x0", "0"}), rule) == 0.0);
}

TEST_CASE("energies on curved charts, frozen against adaptive quadrature") {
  const auto s = sphere_map();
  CHECK(energy(*s, tensor_gauss_legendre(s->source().box(), 24)) == doctest::Approx(6.8959980672694202348).epsilon(1e-10));

  auto hsrc = chart(Box({{-1, 1}, {0.5, 2}}), {{"1/x1^2", "0"}, {"0", "1/x1^2"}});
  auto htgt = chart(Box({{-2, 3}, {0.1, 3}}), {{"1/x1^2", "0"}, {"0", "1/x1^2"}});
  auto h = map(hsrc, htgt, {"x0 + 0.2*x1^2", "x1 + 0.1*sin(x0)*x1"});
  CHECK(energy(*h, tensor_gauss_legendre(hsrc->box(), 24)) == doctest::Approx(2.9065210693734621889).epsilon(1e-10));

  // Identity into polar coordinates: ∫ r dr dθ over [1,2]×[0,1].
  auto p = map(euclidean(Box({{1, 2}, {0, 1}})), chart(Box({{0.5, 2.5}, {-0.5, 1.5}}), {{"1", "0"}, {"0", "x0^2"}}), {"x0", "x1"});
  CHECK(energy(*p, tensor_gauss_legendre(p->source().box(), 4)) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("localized fields and perturbed maps") {
  const Box box = Box::cube(2, -1, 1);
  const LocalizedField xi(VectorFieldOnChart(2, exprs({"1 + x0", "x1^2"}, 2)), Bump(box));
  const std::array<double, 2> p{0.3, -0.2};
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    std::array<double, 2> qp = p, qm = p;
    qp[static_cast<std::size_t>(j)] += h;
    qm[static_cast<std::size_t>(j)] -= h;
    const VecD fd = (xi.value_at(qp) - xi.value_at(qm)) / (2 * h);
    CHECK((xi.jacobian_at(p).col(j) - fd).cwiseAbs().maxCoeff() < 1e-9);
  }
  const std::array<double, 2> edge{1.0, 0.0};
  CHECK(xi.value_at(edge).cwiseAbs().maxCoeff() == 0.0);

  const auto base = sphere_map();
  const auto field = std::make_shared<const LocalizedField>(xi);
  const PerturbedMap f(base, field, 0.5);
  const MapJet j = f.jet(p, 1);
  CHECK((j.value - base->jet(p, 0).value - 0.5 * xi.value_at(p)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((j.jacobian - base->jet(p, 1).jacobian - 0.5 * xi.jacobian_at(p)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS(f.jet(p, 2));
}

TEST_CASE("null-Lagrangian: first variation and energy along variations") {
  const auto base = sphere_map();
  Rng rng = make_rng(21);
  const QuadratureRule rule = tensor_gauss_legendre(base->source().box(), 16);
  for (int trial = 0; trial < 3; ++trial) {
    const Variation var(base, VectorFieldOnChart(2, random_vector_field(base->source().box(), rng)));
    CHECK_NOTHROW(var.validate());
    CHECK(std::abs(first_variation(var, rule)) < 1e-7);
    CHECK(std::abs(first_variation_fd(var, rule, 1e-3)) < 1e-7);
    for (double de : energy_along_variation(var, rule)) CHECK(std::abs(de) < 1e-7);
  }
}

TEST_CASE("the pairing density itself is not identically zero") {
  // Only its integral against localized fields vanishes.
  auto src = euclidean(Box::cube(2, 0, 1));
  auto m = map(src, euclidean(Box::cube(2, -1, 3)), {"x0 + 0.3*sin(x1)", "x1 + 0.2*x0^2"});
  const PointState s = point_state(*m, std::array<double, 2>{0.5, 0.5});
  CHECK(std::abs(cof_pairing_density(*m, s, vec({1.0, 0.0}), MatD::Identity(2, 2))) > 0.1);
}

TEST_CASE("weak form and adjointness") {
  const auto base = sphere_map();
  Rng rng = make_rng(22);
  const QuadratureRule rule = tensor_gauss_legendre(base->source().box(), 16);
  for (int trial = 0; trial < 3; ++trial) {
    const LocalizedField xi(VectorFieldOnChart(2, random_vector_field(base->source().box(), rng)), Bump(base->source().box()));
    const WeakFormResult r = weak_form_residual(*base, xi, rule);
    CHECK(r.residual() < 1e-7);
    CHECK(r.gap() < 1e-8);
  }
}

TEST_CASE("energy depends only on boundary values") {
  auto src = euclidean(Box::cube(2, 0, 1));
  auto tgt = euclidean(Box::cube(2, -1, 3));
  auto f = map(src, tgt, {"x0 + 0.3*sin(x1)", "x1 + 0.2*x0^2"});
  Rng rng = make_rng(23);
  const QuadratureRule rule = tensor_gauss_legendre(src->box(), 16);
  const auto xi = std::make_shared<const LocalizedField>(VectorFieldOnChart(2, random_vector_field(src->box(), rng)), Bump(src->box()));
  for (double amp : {0.05, 0.1, 0.25, 0.5}) CHECK(boundary_dependence_check(*f, PerturbedMap(f, xi, amp), rule) < 1e-9);
  CHECK_THROWS(boundary_dependence_check(*sphere_map(), *sphere_map(), rule));
}
