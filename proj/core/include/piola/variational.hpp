#pragma once

// The volume functional E(f) = ∫ Det df dVol, its variations, and the weak
// form of the Piola identity.

#include <memory>
#include <vector>

#include "piola/chart.hpp"
#include "piola/piola.hpp"

namespace piola {

/// bump · W, a field on the source chart that vanishes with all its
/// derivatives on the boundary of the bump's box. Components are in the
/// target coordinate basis.
class LocalizedField {
 public:
  LocalizedField(VectorFieldOnChart field, Bump bump) : field_(std::move(field)), bump_(std::move(bump)) {}
  const VectorFieldOnChart& field() const { return field_; }
  const Bump& bump() const { return bump_; }
  VecD value_at(std::span<const double> p) const;
  /// (β, j) = ∂_j ξ^β.
  MatD jacobian_at(std::span<const double> p) const;

 private:
  VectorFieldOnChart field_;
  Bump bump_;
};

/// f + scale · ξ in target coordinates. Supports jets up to order 1.
class PerturbedMap final : public SmoothMap {
 public:
  PerturbedMap(std::shared_ptr<const SmoothMap> base, std::shared_ptr<const LocalizedField> xi, double scale)
      : base_(std::move(base)), xi_(std::move(xi)), scale_(scale) {}
  const Chart& source() const override { return base_->source(); }
  const Chart& target() const override { return base_->target(); }
  MapJet jet(std::span<const double> p, int order) const override;
  double scale() const { return scale_; }

 private:
  std::shared_ptr<const SmoothMap> base_;
  std::shared_ptr<const LocalizedField> xi_;
  double scale_;
};

/// f_t = f + t · bump · V for |t| ≤ t_max.
struct Variation {
  std::shared_ptr<const SmoothMap> base;
  std::shared_ptr<const LocalizedField> field;
  double t_max = 0.0;

  /// t_max defaults to 0.1 of the target box's smallest side.
  Variation(std::shared_ptr<const SmoothMap> base, VectorFieldOnChart v);
  PerturbedMap at(double t) const { return PerturbedMap(base, field, t); }
  /// Throws GeometryError if f_{±t_max} leaves the target box at a sampled point.
  void validate(int samples = 400) const;
};

/// ∫ Det df dVol over the source box.
double energy(const SmoothMap& map, const QuadratureRule& rule);

/// |E(f) − E(g)|; requires a Cartesian Euclidean target metric.
double boundary_dependence_check(const SmoothMap& f, const SmoothMap& g, const QuadratureRule& rule);

/// ⟨Cof df, ∇ξ⟩_{g,h} at p, where (∇ξ)_j^β = ∂_j ξ^β + Γ^β_{γδ}(f) ∂_j f^γ ξ^δ.
double cof_pairing_density(const SmoothMap& map, const PointState& s, const VecD& xi, const MatD& dxi);

/// ∫ ⟨Cof df, ∇(bump V)⟩ dVol.
double first_variation(const Variation& var, const QuadratureRule& rule);
/// (E(f_h) − E(f_{−h})) / 2h.
double first_variation_fd(const Variation& var, const QuadratureRule& rule, double h);
/// E(f_t) − E(f) at `count` equally spaced t in [−t_max, t_max].
std::vector<double> energy_along_variation(const Variation& var, const QuadratureRule& rule, int count = 9);

struct WeakFormResult {
  double pairing = 0.0;  // ∫ ⟨Cof df, ∇ξ⟩ dVol
  double adjoint = 0.0;  // ∫ ⟨ξ, δ Cof df⟩_h dVol
  double residual() const { return std::abs(pairing); }
  double gap() const { return std::abs(pairing - adjoint); }
};
WeakFormResult weak_form_residual(const SmoothMap& map, const LocalizedField& xi, const QuadratureRule& rule);

}  // namespace piola
