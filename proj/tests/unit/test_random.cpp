#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "piola/random_fields.hpp"

using namespace piola;

TEST_CASE("generators are reproducible from the seed") {
  Rng a = make_rng(42), b = make_rng(42), c = make_rng(43);
  CHECK(random_matrix(3, a) == random_matrix(3, b));
  CHECK(random_matrix(3, a) != random_matrix(3, c));
}

TEST_CASE("random orthogonal matrices") {
  Rng rng = make_rng(1);
  for (int d = 1; d <= 6; ++d) {
    const MatD q = random_orthogonal(d, rng);
    CHECK((q.transpose() * q - MatD::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("random SPD matrices respect the condition bound") {
  Rng rng = make_rng(2);
  for (int d = 1; d <= 6; ++d) {
    const MatD g = random_spd(d, rng, 100.0);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const VecD ev = Eigen::SelfAdjointEigenSolver<MatD>(g).eigenvalues();
    CHECK(ev.minCoeff() >= 1.0 - 1e-12);
    CHECK(ev.maxCoeff() <= 100.0 + 1e-10);
  }
}

TEST_CASE("random vector fields stay below one in magnitude") {
  Rng rng = make_rng(3);
  const Box box({{-1, 1}, {0.5, 2}});
  for (int trial = 0; trial < 5; ++trial) {
    const auto field = random_vector_field(box, rng);
    REQUIRE(field.size() == 2);
    for (const auto& p : halton_points(box, 100, 1, 0.0))
      for (const auto& c : field) CHECK(std::abs(eval(c, as_span(p))) < 1.0);
  }
}

TEST_CASE("normalized coordinates span [-1, 1]") {
  const Box box({{2, 6}, {0, 1}});
  const Expr u = normalized_coordinate(box, 0);
  CHECK(eval(u, std::array<double, 2>{2, 0.5}) == -1.0);
  CHECK(eval(u, std::array<double, 2>{6, 0.5}) == 1.0);
}
