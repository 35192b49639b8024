#include "piola/variational.hpp"

#include <cmath>

namespace piola {

VecD LocalizedField::value_at(std::span<const double> p) const { return bump_.value_at(p) * field_.value_at(p); }

MatD LocalizedField::jacobian_at(std::span<const double> p) const {
  const VecD w = field_.value_at(p);
  const VecD grad = bump_.gradient_at(p);
  return bump_.value_at(p) * field_.jacobian_at(p) + w * grad.transpose();
}

MapJet PerturbedMap::jet(std::span<const double> p, int order) const {
  if (order > 1) throw GeometryError("perturbed maps provide jets up to order 1");
  MapJet j = base_->jet(p, order);
  j.value += scale_ * xi_->value_at(p);
  if (order >= 1) j.jacobian += scale_ * xi_->jacobian_at(p);
  return j;
}

Variation::Variation(std::shared_ptr<const SmoothMap> b, VectorFieldOnChart v) : base(std::move(b)) {
  if (!base) throw GeometryError("variation without a base map");
  if (v.dim() != base->dim()) throw GeometryError("variation field dimension mismatch");
  field = std::make_shared<const LocalizedField>(std::move(v), Bump(base->source().box()));
  t_max = 0.1 * base->target().box().min_side();
}

void Variation::validate(int samples) const {
  for (const VecD& x : halton_points(base->source().box(), samples, 0, 0.0)) {
    for (double t : {-t_max, t_max}) {
      const VecD ft = at(t).jet(as_span(x), 0).value;
      if (!base->target().box().contains(as_span(ft)))
        throw GeometryError("varied map leaves the target box");
    }
  }
}

double energy(const SmoothMap& map, const QuadratureRule& rule) {
  return integrate(map.source(), rule, [&](std::span<const double> p) { return det_df_at(map, p); });
}

double boundary_dependence_check(const SmoothMap& f, const SmoothMap& g, const QuadratureRule& rule) {
  if (!f.target().is_cartesian() || !g.target().is_cartesian())
    throw GeometryError("boundary dependence requires a Cartesian Euclidean target");
  return std::abs(energy(f, rule) - energy(g, rule));
}

double cof_pairing_density(const SmoothMap& map, const PointState& s, const VecD& xi, const MatD& dxi) {
  const int d = map.dim();
  const MatD cof = intrinsic_cof(make_differential<double>(s.jacobian, s.g, s.h)).matrix;
  MatD nabla = dxi;
  for (int b = 0; b < d; ++b)
    for (int j = 0; j < d; ++j)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e)
          nabla(b, j) += s.gamma_tgt[static_cast<std::size_t>(b)](c, e) * s.jacobian(c, j) * xi(e);
  double acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) acc += s.g_inv(i, j) * s.h(a, b) * cof(a, i) * nabla(b, j);
  return acc;
}

double first_variation(const Variation& var, const QuadratureRule& rule) {
  const SmoothMap& map = *var.base;
  return integrate(map.source(), rule, [&](std::span<const double> p) {
    const PointState s = point_state(map, p, 1);
    return cof_pairing_density(map, s, var.field->value_at(p), var.field->jacobian_at(p));
  });
}

double first_variation_fd(const Variation& var, const QuadratureRule& rule, double h) {
  return (energy(var.at(h), rule) - energy(var.at(-h), rule)) / (2.0 * h);
}

std::vector<double> energy_along_variation(const Variation& var, const QuadratureRule& rule, int count) {
  const double e0 = energy(*var.base, rule);
  std::vector<double> out;
  for (int n = 0; n < count; ++n) {
    const double t = count == 1 ? 0.0 : -var.t_max + 2.0 * var.t_max * n / (count - 1);
    out.push_back(energy(var.at(t), rule) - e0);
  }
  return out;
}

WeakFormResult weak_form_residual(const SmoothMap& map, const LocalizedField& xi, const QuadratureRule& rule) {
  WeakFormResult r;
  r.pairing = integrate(map.source(), rule, [&](std::span<const double> p) {
    const PointState s = point_state(map, p, 1);
    return cof_pairing_density(map, s, xi.value_at(p), xi.jacobian_at(p));
  });
  r.adjoint = integrate(map.source(), rule, [&](std::span<const double> p) {
    const VecD fp = map.jet(p, 0).value;
    const MatD h = map.target().metric_at(as_span(fp));
    return xi.value_at(p).dot(h * coderivative_cof_at(map, p).value);
  });
  return r;
}

}  // namespace piola
