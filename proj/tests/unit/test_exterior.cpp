#include <doctest.h>

#include <cmath>
#include <memory>

#include <Eigen/LU>

#include "piola/exterior.hpp"
#include "piola/random_fields.hpp"

using namespace piola;

namespace {

using Space = OrientedInnerProductSpace<double>;

MatD mat2(double a, double b, double c, double d) {
  MatD m(2, 2);
  m << a, b, c, d;
  return m;
}

std::shared_ptr<const Space> space(const MatD& g, int orientation = 1) {
  return std::make_shared<const Space>(g, orientation);
}

// ⟨α, β⟩ on Λ_k through the induced Gram.
double inner_k(const Space& s, int k, const VecD& a, const VecD& b) {
  return a.dot(exterior_gram(s, k) * b);
}

}  // namespace

TEST_CASE("multi-indices and shuffle signs") {
  CHECK(multi_indices(4, 2).size() == 6);
  CHECK(multi_indices(4, 0).size() == 1);
  CHECK(multi_index_position(4, {1, 3}) == 4);
  CHECK(shuffle_sign({0}, {1}) == 1);
  CHECK(shuffle_sign({1}, {0}) == -1);
  CHECK(shuffle_sign({0, 2}, {1}) == -1);
  CHECK(shuffle_sign({0, 1}, {1}) == 0);
}

TEST_CASE("wedge is graded anticommutative and associative") {
  Rng rng = make_rng(11);
  auto s = std::make_shared<const Space>(Space::euclidean(4));
  auto rand_k = [&](int k) { return KVector<double>(s, k, random_vector(binomial(4, k), rng)); };
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = rand_k(1), b = rand_k(2), c = rand_k(1);
    CHECK((wedge(a, b).coeffs - wedge(b, a).coeffs).cwiseAbs().maxCoeff() < 1e-14);  // (−1)^{1·2} = +1
    CHECK((wedge(a, c).coeffs + wedge(c, a).coeffs).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((wedge(wedge(a, b), c).coeffs - wedge(a, wedge(b, c)).coeffs).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK_THROWS_AS(wedge(rand_k(3), rand_k(2)), ExteriorError);
}

TEST_CASE("Hodge star satisfies its defining relation in non-orthonormal bases") {
  Rng rng = make_rng(12);
  for (int d = 1; d <= 5; ++d) {
    for (int orientation : {1, -1}) {
      const auto s = space(random_spd(d, rng, 50.0), orientation);
      const double vol = volume_coefficient(*s);
      for (int k = 0; k <= d; ++k) {
        const KVector<double> a(s, k, random_vector(binomial(d, k), rng));
        const KVector<double> b(s, k, random_vector(binomial(d, k), rng));
        const KVector<double> lhs = wedge(a, hodge_star(s, k, b));
        CHECK(lhs.coeffs(0) == doctest::Approx(inner_k(*s, k, a.coeffs, b.coeffs) * vol).epsilon(1e-11));
        // ⋆⋆ = (−1)^{k(d−k)}
        const auto twice = hodge_star(s, d - k, hodge_star(s, k, a));
        const double sign = (k * (d - k)) % 2 == 0 ? 1.0 : -1.0;
        CHECK((twice.coeffs - sign * a.coeffs).cwiseAbs().maxCoeff() < 1e-10 * (1 + a.coeffs.cwiseAbs().maxCoeff()));
      }
      CHECK(vol * vol * s->gram().determinant() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((vol > 0) == (orientation > 0));
    }
  }
}

TEST_CASE("Hodge star of a basis vector, frozen against a symbolic oracle") {
  const auto s = space(mat2(2.0, 0.5, 0.5, 1.0));
  const MatD star = hodge_matrix(*s, 1);
  CHECK(star(0, 0) == doctest::Approx(-0.37796447300922722721).epsilon(1e-14));
  CHECK(star(1, 0) == doctest::Approx(1.5118578920369089089).epsilon(1e-14));
  CHECK(star(0, 1) == doctest::Approx(-0.75592894601845445443).epsilon(1e-14));
  CHECK(star(1, 1) == doctest::Approx(0.37796447300922722721).epsilon(1e-14));

  const auto diag = space(mat2(4.0, 0.0, 0.0, 1.0));
  const MatD d = hodge_matrix(*diag, 1);
  CHECK(d(1, 0) == doctest::Approx(2.0));
  CHECK(d(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("intrinsic determinant and cofactor, frozen against a symbolic oracle") {
  const LinearMap<double> a(Space(mat2(2.0, 0.5, 0.5, 1.0)), Space(mat2(1.0, 0.2, 0.2, 3.0)), mat2(1, 2, 3, 4));
  CHECK(intrinsic_det(a) == doctest::Approx(-2.6010986689693810449).epsilon(1e-14));
  const MatD cof = intrinsic_cof(a).matrix;
  CHECK(cof(0, 0) == doctest::Approx(8.8753704583076853221).epsilon(1e-13));
  CHECK(cof(0, 1) == doctest::Approx(-1.3181243254912403944).epsilon(1e-13));
  CHECK(cof(1, 0) == doctest::Approx(-2.1089989207859846310).epsilon(1e-13));
  CHECK(cof(1, 1) == doctest::Approx(0.087874955032749359625).epsilon(1e-12));
}

TEST_CASE("determinant of the identity between scaled metrics") {
  // Volume shrinks by √det G_W / √det G_V = 1/4.
  const LinearMap<double> a(Space(4.0 * MatD::Identity(2, 2)), Space(MatD::Identity(2, 2)), MatD::Identity(2, 2));
  CHECK(intrinsic_det(a) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("orientation reversal flips the determinant and the cofactor") {
  Rng rng = make_rng(13);
  for (int d = 1; d <= 4; ++d) {
    const MatD gv = random_spd(d, rng, 10), gw = random_spd(d, rng, 10), m = random_matrix(d, rng);
    const LinearMap<double> plus(Space(gv, 1), Space(gw, 1), m);
    const LinearMap<double> flipped(Space(gv, 1), Space(gw, -1), m);
    CHECK(intrinsic_det(flipped) == doctest::Approx(-intrinsic_det(plus)).epsilon(1e-12));
    CHECK((intrinsic_cof(flipped).matrix + intrinsic_cof(plus).matrix).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("determinant is multiplicative and the cofactor is functorial") {
  Rng rng = make_rng(14);
  for (int d = 1; d <= 5; ++d) {
    const Space u(random_spd(d, rng, 10)), v(random_spd(d, rng, 10)), w(random_spd(d, rng, 10));
    const LinearMap<double> a(u, v, random_matrix(d, rng)), b(v, w, random_matrix(d, rng));
    const auto ba = compose(b, a);
    CHECK(intrinsic_det(ba) == doctest::Approx(intrinsic_det(b) * intrinsic_det(a)).epsilon(1e-11));
    const MatD expected = intrinsic_cof(b).matrix * intrinsic_cof(a).matrix;
    CHECK((intrinsic_cof(ba).matrix - expected).cwiseAbs().maxCoeff() < 1e-10 * (1 + expected.cwiseAbs().maxCoeff()));
  }
  CHECK_THROWS_AS(compose(LinearMap<double>(Space::euclidean(2), Space::euclidean(2), MatD::Identity(2, 2)),
                          LinearMap<double>(Space::euclidean(2), Space(mat2(2, 0, 0, 1)), MatD::Identity(2, 2))),
                  ExteriorError);
}

TEST_CASE("cofactor equals Det times the inverse adjoint for invertible maps") {
  Rng rng = make_rng(15);
  for (int d = 2; d <= 6; ++d) {
    const LinearMap<double> a(Space(random_spd(d, rng, 20)), Space(random_spd(d, rng, 20)), random_matrix(d, rng) + 2.0 * MatD::Identity(d, d));
    const MatD adj = metric_transpose(a).matrix;
    const MatD expected = intrinsic_det(a) * adj.inverse();
    CHECK((intrinsic_cof(a).matrix - expected).cwiseAbs().maxCoeff() < 1e-9 * (1 + expected.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("double and Dual pipelines agree bit for bit on values") {
  Rng rng = make_rng(16);
  const int d = 4;
  const MatD gv = random_spd(d, rng, 10), gw = random_spd(d, rng, 10), m = random_matrix(d, rng);
  const MatD dm = random_matrix(d, rng);
  const LinearMap<double> plain(Space(gv), Space(gw), m);
  const LinearMap<Dual> dual(OrientedInnerProductSpace<Dual>(make_dual(gv, MatD::Zero(d, d))),
                             OrientedInnerProductSpace<Dual>(make_dual(gw, MatD::Zero(d, d))), make_dual(m, dm));
  CHECK(intrinsic_det(dual).value == intrinsic_det(plain));
  CHECK(values(intrinsic_cof(dual).matrix) == intrinsic_cof(plain).matrix);
  // Jacobi's formula: d Det = ⟨Cof, dM⟩ in the Frobenius pairing of working coordinates
  // after lowering with the metrics.
  const MatD cof = intrinsic_cof(plain).matrix;
  const double jacobi = (gw * cof * gv.inverse()).cwiseProduct(dm).sum();
  CHECK(intrinsic_det(dual).deriv == doctest::Approx(jacobi).epsilon(1e-11));
}

TEST_CASE("Dual determinants of singular matrices keep their derivative") {
  // The value part has a zero row, so elimination stops; d det = cof : dM.
  MatD v(3, 3), dv(3, 3);
  v << 1, 2, 3, 0, 0, 0, 4, 5, 7;
  dv << 0.3, -0.1, 0.2, 1.0, 2.0, -1.5, 0.4, 0.0, 0.6;
  const Dual det = determinant<Dual>(make_dual(v, dv));
  CHECK(det.value == 0.0);
  CHECK(det.deriv == doctest::Approx(matrix_cofactor<double>(v).cwiseProduct(dv).sum()).epsilon(1e-14));
  const double h = 1e-7;
  CHECK(det.deriv == doctest::Approx(((v + h * dv).determinant() - (v - h * dv).determinant()) / (2 * h)).epsilon(1e-7));
  // Identity minors: the derivation matrix of a 1-vector is Ω itself.
  Mat<Dual> m(1, 1);
  m(0, 0) = Dual(0.0, 2.5);
  CHECK(determinant<Dual>(m).deriv == 2.5);
}

TEST_CASE("invalid spaces and maps are rejected") {
  CHECK_THROWS_AS(Space(mat2(1, 0.5, 0.4, 1)), ExteriorError);
  CHECK_THROWS_AS(Space(mat2(1, 2, 2, 1)), ExteriorError);
  CHECK_THROWS_AS(Space(MatD::Identity(2, 2), 0), ExteriorError);
  CHECK_THROWS_AS(Space(MatD::Identity(9, 9)), ExteriorError);
  CHECK_THROWS_AS(LinearMap<double>(Space::euclidean(2), Space::euclidean(3), MatD::Zero(3, 2)), ExteriorError);
}

TEST_CASE("hyperplane restriction with an explicit construction") {
  // A = diag(2, 3, 5) on Euclidean R^3 preserves e_2^⊥; Cof A e_2 = 6 e_2.
  MatD m = MatD::Zero(3, 3);
  m.diagonal() << 2, 3, 5;
  const LinearMap<double> a(Space::euclidean(3), Space::euclidean(3), m);
  const VecD e2 = VecD::Unit(3, 2);
  const auto r = restricted_det_check(a, e2, e2);
  CHECK(r.restricted_det == doctest::Approx(6.0));
  CHECK(r.residual < 1e-14);
  CHECK_THROWS_AS(restricted_det_check(a, 2.0 * e2, e2), ExteriorError);
  MatD shear = m;
  shear(2, 0) = 1.0;
  CHECK_THROWS_AS(restricted_det_check(LinearMap<double>(Space::euclidean(3), Space::euclidean(3), shear), e2, e2),
                  ExteriorError);
}
