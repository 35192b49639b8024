#include <cmath>

#include <boost/math/special_functions/legendre.hpp>

#include "piola/chart.hpp"

namespace piola {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw GeometryError("gauss_legendre: order must be positive");
  // Boost returns the non-negative roots in ascending order.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  for (auto it = half.rbegin(); it != half.rend(); ++it)
    if (*it != 0.0) nodes.push_back(-*it);
  for (double x : half) nodes.push_back(x);
  std::vector<double> weights;
  weights.reserve(nodes.size());
  for (double x : nodes) {
    const double dp = boost::math::legendre_p_prime(n, x);
    weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return {std::move(nodes), std::move(weights)};
}

QuadratureRule tensor_gauss_legendre(const Box& box, int order) {
  const auto [x, w] = gauss_legendre(order);
  const int d = box.dim();
  QuadratureRule rule;
  rule.order = order;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(order);
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  std::vector<int> counter(static_cast<std::size_t>(d), 0);
  for (std::size_t n = 0; n < total; ++n) {
    VecD p(d);
    double weight = 1.0;
    for (int i = 0; i < d; ++i) {
      const auto [lo, hi] = box.bounds[static_cast<std::size_t>(i)];
      const double half = 0.5 * (hi - lo);
      const int k = counter[static_cast<std::size_t>(i)];
      p(i) = lo + half * (x[static_cast<std::size_t>(k)] + 1.0);
      weight *= half * w[static_cast<std::size_t>(k)];
    }
    rule.nodes.push_back(std::move(p));
    rule.weights.push_back(weight);
    for (int i = d - 1; i >= 0; --i) {
      if (++counter[static_cast<std::size_t>(i)] < order) break;
      counter[static_cast<std::size_t>(i)] = 0;
    }
  }
  return rule;
}

double pairwise_sum(std::span<const double> terms) {
  if (terms.size() <= 8) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace piola
