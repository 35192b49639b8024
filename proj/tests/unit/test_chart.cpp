#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include <Eigen/LU>

#include "piola/chart.hpp"
#include "piola/piola.hpp"
#include "support.hpp"

using namespace piola;
using namespace piola::test;

namespace {
const Box kPolarBox({{1.0, 2.0}, {0.0, 1.0}});
auto polar() { return chart(kPolarBox, {{"1", "0"}, {"0", "x0^2"}}); }
auto sphere() { return chart(Box::cube(2, -1, 1), {{"4/(1 + x0^2 + x1^2)^2", "0"}, {"0", "4/(1 + x0^2 + x1^2)^2"}}); }
}  // namespace

TEST_CASE("box geometry") {
  const Box b({{0, 2}, {-1, 3}});
  CHECK(b.volume() == 8.0);
  CHECK(b.min_side() == 2.0);
  const std::array<double, 2> in{1, 0}, out{2.5, 0};
  CHECK(b.contains(in));
  CHECK_FALSE(b.contains(out));
  CHECK(b.contains(out, 0.5));
  const Box s = b.shrunk(0.25);
  CHECK(s.bounds[0].first == 0.5);
  CHECK(s.bounds[1].second == 2.0);
  CHECK_THROWS(Box({{1, 0}}));
}

TEST_CASE("polar Christoffel symbols at r = 2") {
  const std::array<double, 2> p{2.0, 0.3};
  const auto g = polar()->christoffel_at(p);
  CHECK(g[0](1, 1) == doctest::Approx(-2.0));
  CHECK(g[1](0, 1) == doctest::Approx(0.5));
  CHECK(g[1](1, 0) == doctest::Approx(0.5));
  CHECK(g[0](0, 0) == 0.0);
  CHECK(polar()->volume_density_at(p) == doctest::Approx(2.0));
}

TEST_CASE("hyperbolic half-plane Christoffel symbols at (0, 1)") {
  const auto h = chart(Box({{-1, 1}, {0.5, 2}}), {{"1/x1^2", "0"}, {"0", "1/x1^2"}});
  const std::array<double, 2> p{0.0, 1.0};
  const auto g = h->christoffel_at(p);
  CHECK(g[1](0, 0) == doctest::Approx(1.0));
  CHECK(g[0](0, 1) == doctest::Approx(-1.0));
  CHECK(g[1](1, 1) == doctest::Approx(-1.0));
  CHECK(g[0](0, 0) == doctest::Approx(0.0));
}

TEST_CASE("Christoffel symbols, frozen against a symbolic oracle") {
  const auto a = chart(Box::cube(2, 0, 1), {{"1 + x0^2", "0"}, {"0", "exp(x1)"}});
  const std::array<double, 2> p{0.3, 0.7};
  const auto ga = a->christoffel_at(p);
  CHECK(ga[0](0, 0) == doctest::Approx(0.27522935779816513761).epsilon(1e-14));
  CHECK(ga[1](1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ga[0](1, 1) == 0.0);

  const std::array<double, 2> q{0.2, -0.4};
  const auto gs = sphere()->christoffel_at(q);
  const double third = 1.0 / 3.0;
  CHECK(gs[0](0, 0) == doctest::Approx(-third).epsilon(1e-14));
  CHECK(gs[0](0, 1) == doctest::Approx(2 * third).epsilon(1e-14));
  CHECK(gs[0](1, 1) == doctest::Approx(third).epsilon(1e-14));
  CHECK(gs[1](0, 0) == doctest::Approx(-2 * third).epsilon(1e-14));
  CHECK(gs[1](0, 1) == doctest::Approx(-third).epsilon(1e-14));
  CHECK(gs[1](1, 1) == doctest::Approx(2 * third).epsilon(1e-14));
}

TEST_CASE("metric derivatives and the orthonormal frame") {
  const auto c = chart(Box::cube(2, -1, 1), {{"2 + x0*x1", "0.3*sin(x0)"}, {"0.3*sin(x0)", "1 + x1^2"}});
  const std::array<double, 2> p{0.4, -0.2};
  const std::array<double, 2> v{0.7, -1.1};
  const MatD dg = c->metric_derivative_at(p, v);
  const double h = 1e-6;
  const std::array<double, 2> pp{p[0] + h * v[0], p[1] + h * v[1]}, pm{p[0] - h * v[0], p[1] - h * v[1]};
  CHECK((dg - (c->metric_at(pp) - c->metric_at(pm)) / (2 * h)).cwiseAbs().maxCoeff() < 1e-8);
  const MatD e = c->orthonormal_frame_at(p);
  CHECK((e.transpose() * c->metric_at(p) * e - MatD::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(e.determinant() > 0);
  CHECK((c->metric_at(p) * c->inverse_metric_at(p) - MatD::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("metric validation names the failure") {
  CHECK_NOTHROW(sphere()->validate());
  CHECK(Chart::euclidean(Box::cube(3, 0, 1)).is_cartesian());
  CHECK_FALSE(polar()->is_cartesian());
  const auto indefinite = chart(Box::cube(2, -1, 1), {{"x0", "0"}, {"0", "1"}});
  CHECK_THROWS_WITH_AS(indefinite->validate(), doctest::Contains("positive definite"), GeometryError);
  const auto asymmetric = chart(Box::cube(2, -1, 1), {{"1", "x0"}, {"0", "1"}});
  CHECK_THROWS_WITH_AS(asymmetric->validate(), doctest::Contains("symmetric"), GeometryError);
  const auto stiff = chart(Box::cube(2, 0, 1), {{"1", "0"}, {"0", "1e-7"}});
  CHECK_THROWS_WITH_AS(stiff->validate(), doctest::Contains("condition"), GeometryError);
  const auto singular = chart(Box::cube(2, -1, 1), {{"1/x0", "0"}, {"0", "1"}});
  CHECK_THROWS_AS(singular->validate(), GeometryError);
}

TEST_CASE("map jets and image validation") {
  auto m = map(euclidean(Box::cube(2, 0, 1)), euclidean(Box::cube(2, -1, 3)), {"x0 + 0.3*sin(x1)", "x1 + 0.2*x0^2"});
  const std::array<double, 2> p{0.5, 0.25};
  const MapJet j = m->jet(p, 2);
  CHECK(j.value(0) == doctest::Approx(0.5 + 0.3 * std::sin(0.25)));
  CHECK(j.jacobian(0, 1) == doctest::Approx(0.3 * std::cos(0.25)));
  CHECK(j.jacobian(1, 0) == doctest::Approx(0.2));
  CHECK(j.second[1](0, 1) == doctest::Approx(-0.3 * std::sin(0.25)));
  CHECK(j.second[0](1, 0) == doctest::Approx(0.4));
  CHECK(m->jet(p, 0).jacobian.size() == 0);
  CHECK_NOTHROW(m->validate_image());
  auto escaping = map(euclidean(Box::cube(2, 0, 1)), euclidean(Box::cube(2, 0, 1)), {"2*x0", "x1"});
  CHECK_THROWS_WITH_AS(escaping->validate_image(), doctest::Contains("target box"), GeometryError);
}

TEST_CASE("Gauss-Legendre rules") {
  const auto [x, w] = gauss_legendre(5);
  CHECK(x[2] == doctest::Approx(0.0));
  CHECK(x[4] == doctest::Approx(std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(128.0 / 225.0).epsilon(1e-15));
  // Exact for polynomials of degree 2n − 1.
  for (int n = 1; n <= 12; ++n) {
    const auto [xs, ws] = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * std::pow(xs[i], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  const QuadratureRule r = tensor_gauss_legendre(Box({{1, 2}, {0, 3}}), 4);
  CHECK(r.nodes.size() == 16);
  CHECK(pairwise_sum(r.weights) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("integration uses the Riemannian volume") {
  const auto p = polar();
  const QuadratureRule r = tensor_gauss_legendre(kPolarBox, 8);
  CHECK(integrate(*p, r, [](auto) { return 1.0; }) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(integrate(*p, r, [](auto q) { return q[1]; }) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("pairwise summation is exact on exactly representable sums") {
  std::vector<double> t(1000, 0.125);
  CHECK(pairwise_sum(t) == 125.0);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("Halton points are deterministic, inside the shrunk box and distinct") {
  const Box b({{-1, 1}, {0.5, 2}});
  const auto a = halton_points(b, 200, 7);
  const auto c = halton_points(b, 200, 7);
  const auto other = halton_points(b, 200, 8);
  REQUIRE(a.size() == 200);
  std::set<std::pair<double, double>> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == c[i]);
    CHECK(b.shrunk(0.05).contains(as_span(a[i]), 1e-15));
    seen.insert({a[i](0), a[i](1)});
  }
  CHECK(seen.size() == 200);
  CHECK(a[0] != other[0]);
}

TEST_CASE("bump vanishes on the boundary and matches its derivatives") {
  const Bump bump(Box({{0, 2}, {-1, 1}}));
  const std::array<double, 2> centre{1, 0}, edge{0, 0.3}, outside{3, 0};
  CHECK(bump.value_at(centre) == doctest::Approx(std::exp(-8.0)).epsilon(1e-14));
  CHECK(bump.value_at(edge) == 0.0);
  CHECK(bump.value_at(outside) == 0.0);
  CHECK(bump.gradient_at(outside).cwiseAbs().maxCoeff() == 0.0);
  const std::array<double, 2> p{0.6, 0.35};
  const double h = 1e-6;
  const VecD g = bump.gradient_at(p);
  const MatD hess = bump.hessian_at(p);
  for (int i = 0; i < 2; ++i) {
    std::array<double, 2> qp = p, qm = p;
    qp[static_cast<std::size_t>(i)] += h;
    qm[static_cast<std::size_t>(i)] -= h;
    CHECK(g(i) == doctest::Approx((bump.value_at(qp) - bump.value_at(qm)) / (2 * h)).epsilon(1e-7));
    const VecD dg = (bump.gradient_at(qp) - bump.gradient_at(qm)) / (2 * h);
    CHECK((hess.col(i) - dg).cwiseAbs().maxCoeff() < 1e-7 * (1 + hess.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("divergence on curved charts") {
  const std::array<double, 2> p{1.7, 0.4};
  const VectorFieldOnChart radial(2, exprs({"x0", "0"}, 2));
  CHECK(divergence_at(*polar(), radial, p) == doctest::Approx(2.0).epsilon(1e-14));

  const VectorFieldOnChart x(2, exprs({"0.5*x1", "-0.5*x0 + 0.1"}, 2));
  const std::array<double, 2> q{0.2, -0.4};
  CHECK(divergence_at(*sphere(), x, q) == doctest::Approx(0.13333333333333333333).epsilon(1e-13));
  const FieldJet jet{x.value_at(q), x.jacobian_at(q)};
  CHECK(divergence_volume_form(*sphere(), q, jet) == doctest::Approx(divergence_christoffel_form(*sphere(), q, jet)).epsilon(1e-14));
}

TEST_CASE("Christoffel trace identity") {
  const auto c = chart(Box::cube(2, -1, 1), {{"2 + x0*x1", "0.3*sin(x0)"}, {"0.3*sin(x0)", "1 + x1^2"}});
  for (const auto& q : halton_points(c->box(), 50, 3)) CHECK(christoffel_trace_residual(*c, as_span(q)) < 1e-13);
}
