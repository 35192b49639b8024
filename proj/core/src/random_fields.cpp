#include "piola/random_fields.hpp"

#include <Eigen/QR>

namespace piola {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Expr normalized_coordinate(const Box& box, int i) {
  const auto [lo, hi] = box.bounds[static_cast<std::size_t>(i)];
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  return (Expr::variable(i) - Expr::constant(center)) / Expr::constant(half);
}

namespace {

void monomials(int d, int degree, int var, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (var == d) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int e : current) used += e;
  for (int e = 0; used + e <= degree; ++e) {
    current[static_cast<std::size_t>(var)] = e;
    monomials(d, degree, var + 1, current, out);
  }
  current[static_cast<std::size_t>(var)] = 0;
}

}  // namespace

Expr random_polynomial(const Box& box, int degree, double amplitude, Rng& rng) {
  const int d = box.dim();
  std::vector<std::vector<int>> terms;
  std::vector<int> current(static_cast<std::size_t>(d), 0);
  monomials(d, degree, 0, current, terms);
  Expr sum = Expr::constant(uniform(rng, -amplitude, amplitude));
  for (const auto& powers : terms) {
    bool constant_term = true;
    Expr term = Expr::constant(uniform(rng, -amplitude, amplitude));
    for (int i = 0; i < d; ++i) {
      const int e = powers[static_cast<std::size_t>(i)];
      if (e == 0) continue;
      constant_term = false;
      const Expr s = normalized_coordinate(box, i);
      term = term * (e == 1 ? s : pow(s, e));
    }
    if (!constant_term) sum = sum + term;
  }
  return sum;
}

Expr random_trig(const Box& box, int terms, double amplitude, Rng& rng) {
  const int d = box.dim();
  std::uniform_int_distribution<int> pick(0, d - 1);
  Expr sum = Expr::constant(0.0);
  for (int t = 0; t < terms; ++t) {
    const int i = pick(rng);
    const int j = pick(rng);
    const Expr arg = Expr::constant(uniform(rng, 0.5, 2.0)) * normalized_coordinate(box, i) +
                     Expr::constant(uniform(rng, 0.5, 2.0)) * normalized_coordinate(box, j) +
                     Expr::constant(uniform(rng, -1.0, 1.0));
    const Expr wave = (t % 2 == 0) ? sin(arg) : cos(arg);
    Expr term = Expr::constant(uniform(rng, -amplitude, amplitude)) * wave;
    if (t % 3 == 2) term = term * normalized_coordinate(box, pick(rng));
    sum = sum + term;
  }
  return sum;
}

std::vector<Expr> random_vector_field(const Box& box, Rng& rng) {
  std::vector<Expr> out;
  const int d = box.dim();
  // at most (d+1)(d+2)/2 monomials, each bounded by 1 on the box
  const int count = (d + 1) * (d + 2) / 2;
  for (int a = 0; a < d; ++a) out.push_back(random_polynomial(box, 2, 1.0 / (count + 1), rng));
  return out;
}

std::vector<Expr> random_trig_map(const Box& box, double amplitude, Rng& rng) {
  std::vector<Expr> out;
  for (int a = 0; a < box.dim(); ++a) {
    const auto [lo, hi] = box.bounds[static_cast<std::size_t>(a)];
    out.push_back(Expr::variable(a) + Expr::constant(0.5 * (hi - lo)) * random_trig(box, 3, amplitude, rng));
  }
  return out;
}

MatD random_matrix(int d, Rng& rng, double lo, double hi) {
  MatD m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = uniform(rng, lo, hi);
  return m;
}

VecD random_vector(int d, Rng& rng, double lo, double hi) {
  VecD v(d);
  for (int i = 0; i < d; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

MatD random_orthogonal(int d, Rng& rng) {
  const MatD m = random_matrix(d, rng);
  Eigen::HouseholderQR<MatD> qr(m);
  MatD q = qr.householderQ();
  // fix the sign ambiguity of QR so the distribution is uniform
  const MatD r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

MatD random_spd(int d, Rng& rng, double condition) {
  const MatD q = random_orthogonal(d, rng);
  VecD eig(d);
  for (int i = 0; i < d; ++i) eig(i) = std::exp(uniform(rng, 0.0, std::log(condition)));
  MatD g = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (g + g.transpose());
}

}  // namespace piola
