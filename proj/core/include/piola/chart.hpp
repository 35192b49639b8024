#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "piola/dense.hpp"
#include "piola/expr.hpp"

namespace piola {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned coordinate box [lo_i, hi_i].
struct Box {
  std::vector<std::pair<double, double>> bounds;

  Box() = default;
  explicit Box(std::vector<std::pair<double, double>> b);
  static Box cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(bounds.size()); }
  double volume() const;
  double min_side() const;
  bool contains(std::span<const double> p, double slack = 0.0) const;
  /// Same center, each side scaled by (1 - 2*fraction).
  Box shrunk(double fraction) const;
};

/// Christoffel symbols, gamma[k](i, j) = Γ^k_{ij}.
using Christoffel = std::vector<MatD>;

/// A coordinate box carrying a Riemannian metric g_ij given by expressions.
class Chart {
 public:
  Chart(Box box, std::vector<std::vector<Expr>> metric);
  static Chart euclidean(Box box);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const Expr& metric_expr(int i, int j) const { return metric_[idx(i, j)]; }
  /// True when every metric entry is the literal constant of the identity.
  bool is_cartesian() const;

  MatD metric_at(std::span<const double> p) const;
  MatD inverse_metric_at(std::span<const double> p) const;
  /// ∂_k g_ij at p.
  MatD metric_partial_at(std::span<const double> p, int k) const;
  /// Directional derivative Σ_k v^k ∂_k g at p.
  MatD metric_derivative_at(std::span<const double> p, std::span<const double> v) const;
  Christoffel christoffel_at(std::span<const double> p) const;
  double volume_density_at(std::span<const double> p) const;
  /// Columns E_i with E^T g E = I, obtained by Gram-Schmidt on the coordinate basis.
  MatD orthonormal_frame_at(std::span<const double> p) const;

  /// Samples the domain and checks symmetry, positive definiteness and
  /// conditioning of the metric; throws GeometryError naming the point.
  void validate(int samples = 1000, double max_condition = 1e6) const;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * dim() + j); }

  Box box_;
  std::vector<Expr> metric_;
  std::vector<Expr> metric_partials_;  // [k][i][j]
};

/// Value, Jacobian and second derivatives of a map at a point.
/// jacobian(a, i) = ∂_i f^a, second[j](a, i) = ∂_j ∂_i f^a.
struct MapJet {
  VecD value;
  MatD jacobian;
  std::vector<MatD> second;
};

/// Smooth map between two charts of equal dimension.
class SmoothMap {
 public:
  virtual ~SmoothMap() = default;
  virtual const Chart& source() const = 0;
  virtual const Chart& target() const = 0;
  /// order 0: value only; 1: adds the Jacobian; 2: adds second derivatives.
  virtual MapJet jet(std::span<const double> p, int order) const = 0;
  int dim() const { return source().dim(); }
};

class ChartMap final : public SmoothMap {
 public:
  ChartMap(std::shared_ptr<const Chart> source, std::shared_ptr<const Chart> target, std::vector<Expr> components);

  const Chart& source() const override { return *source_; }
  const Chart& target() const override { return *target_; }
  std::shared_ptr<const Chart> source_ptr() const { return source_; }
  std::shared_ptr<const Chart> target_ptr() const { return target_; }
  const std::vector<Expr>& components() const { return components_; }
  MapJet jet(std::span<const double> p, int order) const override;

  /// Throws GeometryError if a sampled source point maps outside the target box.
  void validate_image(int samples = 1000) const;

 private:
  std::shared_ptr<const Chart> source_;
  std::shared_ptr<const Chart> target_;
  std::vector<Expr> components_;
  std::vector<Expr> jacobian_;  // [a][i]
  std::vector<Expr> second_;    // [j][a][i]
};

/// Vector field X^a on a chart, in the chart's coordinate basis.
class VectorFieldOnChart {
 public:
  VectorFieldOnChart(int dim, std::vector<Expr> components);

  int dim() const { return dim_; }
  const std::vector<Expr>& components() const { return components_; }
  VecD value_at(std::span<const double> p) const;
  /// jacobian(a, b) = ∂_b X^a.
  MatD jacobian_at(std::span<const double> p) const;

 private:
  int dim_;
  std::vector<Expr> components_;
  std::vector<Expr> jacobian_;  // [a][b]
};

/// Smooth cutoff Π_i φ((x_i − lo_i)/(hi_i − lo_i)) with
/// φ(s) = exp(−1/(s(1−s))) on (0, 1) and 0 outside (peak e^{-4} at s = ½).
/// It vanishes with all derivatives on the box boundary.
class Bump {
 public:
  explicit Bump(Box box) : box_(std::move(box)) {}
  const Box& box() const { return box_; }
  double value_at(std::span<const double> p) const;
  VecD gradient_at(std::span<const double> p) const;
  MatD hessian_at(std::span<const double> p) const;

 private:
  Box box_;
};

/// Low-discrepancy (Halton) points in `box` shrunk by `shrink` per side.
/// The seed selects the starting index of the sequence.
std::vector<VecD> halton_points(const Box& box, int count, std::uint64_t seed, double shrink = 0.05);

/// Tensor-product Gauss-Legendre rule on a box.
struct QuadratureRule {
  int order = 0;
  std::vector<VecD> nodes;
  std::vector<double> weights;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);
QuadratureRule tensor_gauss_legendre(const Box& box, int order);

/// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> terms);

/// Σ_q w_q · field(p_q) · √|g|(p_q).
template <class Field>
double integrate(const Chart& chart, const QuadratureRule& rule, Field&& field) {
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const VecD& p = rule.nodes[q];
    const std::span<const double> ps(p.data(), static_cast<std::size_t>(p.size()));
    const double value = field(ps);
    if (!std::isfinite(value)) throw GeometryError("integrand not finite at a quadrature node");
    terms[q] = rule.weights[q] * value * chart.volume_density_at(ps);
  }
  return pairwise_sum(terms);
}

inline std::span<const double> as_span(const VecD& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace piola
