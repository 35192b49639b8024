#pragma once

// Pointwise evaluation of df, Det df, Cof df and its coderivative, the Piola
// transform, and the residuals of the Piola-type identities built on them.
//
// Derivatives of derived quantities (Cof df, Det df, √|h∘f|) are exact: the
// algebra pipeline runs over Dual numbers whose seeds are the symbolic
// derivatives of the chart-level data (map, metrics).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "piola/chart.hpp"
#include "piola/exterior.hpp"

namespace piola {

/// Everything about the map and both metrics needed at one source point.
struct PointState {
  VecD p;
  MatD jacobian;             // (α, i) = ∂_i f^α
  std::vector<MatD> second;  // [j](α, i) = ∂_j ∂_i f^α (empty unless requested)
  VecD fp;
  MatD g, g_inv;
  double sqrt_g = 0.0;
  MatD h;  // target metric at f(p)
  double sqrt_h = 0.0;
  Christoffel gamma_src;
  Christoffel gamma_tgt;  // at f(p)
};

PointState point_state(const SmoothMap& map, std::span<const double> p, int order = 2);

/// Jacobian, source metric and target metric at p, each carrying its exact
/// derivative along the source direction v.
struct SeededInputs {
  Mat<Dual> jacobian;
  Mat<Dual> g;
  Mat<Dual> h;
};

SeededInputs seeded_inputs(const SmoothMap& map, const PointState& s, const VecD& v);

template <class S>
LinearMap<S> make_differential(const Mat<S>& jacobian, const Mat<S>& g, const Mat<S>& h) {
  return LinearMap<S>(OrientedInnerProductSpace<S>(g, +1), OrientedInnerProductSpace<S>(h, +1), jacobian);
}

LinearMap<double> differential_at(const SmoothMap& map, std::span<const double> p);

double det_df_at(const SmoothMap& map, std::span<const double> p);
/// √|h∘f| / √|g| · det[∂f].
double coordinate_det_df_at(const SmoothMap& map, std::span<const double> p);

/// (α, i) = (Cof df)_i^α.
MatD cof_df_at(const SmoothMap& map, std::span<const double> p);

/// ‖g^{ij} h_{αβ} (Cof df)_i^α − (√|h∘f|/√|g|) cof[df]_{βj}‖∞.
double coordinate_cof_identity_residual(const SmoothMap& map, std::span<const double> p);

/// Cof df at p and its exact derivative along v.
struct CofDirectional {
  MatD value;
  MatD derivative;
};
CofDirectional cof_df_directional(const SmoothMap& map, const PointState& s, const VecD& v);

/// nabla[i](α, j) = (∇_i Cof df)_j^α.
struct CovariantCof {
  MatD cof;
  std::vector<MatD> partial;  // [i](α, j) = ∂_i (Cof df)_j^α
  std::vector<MatD> nabla;
};
CovariantCof covariant_derivative_cof(const SmoothMap& map, const PointState& s);
std::vector<MatD> covariant_derivative_cof_at(const SmoothMap& map, std::span<const double> p);

struct Coderivative {
  VecD value;    // (δ Cof df)^α, target components
  double scale;  // largest constituent term, for normalization
};

/// δω^α = −g^{ij} (∇_i ω)_j^α.
Coderivative coderivative_cof_at(const SmoothMap& map, std::span<const double> p);
/// −Σ_a (∇_{E_a} ω)(E_a) in a g-orthonormal frame, with derivatives taken
/// along the frame vectors.
VecD coderivative_cof_frame_at(const SmoothMap& map, std::span<const double> p);

/// Euclidean row-wise divergence Σ_i ∂_i (cof ∇f)_{αi}; metrics ignored.
Coderivative euclidean_div_cof_at(const SmoothMap& map, std::span<const double> p);

/// A vector field's value and Jacobian (a, b) = ∂_b X^a at a point.
struct FieldJet {
  VecD value;
  MatD jacobian;
};

/// (1/√|g|) ∂_i(√|g| X^i), with ∂_i√|g| from a Dual determinant.
double divergence_volume_form(const Chart& chart, std::span<const double> p, const FieldJet& x);
/// ∂_i X^i + Γ^i_{ik} X^k.
double divergence_christoffel_form(const Chart& chart, std::span<const double> p, const FieldJet& x);
double divergence_at(const Chart& chart, const VectorFieldOnChart& x, std::span<const double> p);

/// Piola(X) = (Cof df)ᵀ (X∘f), metric transpose, source components.
VecD piola_transform_at(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p);
/// Det df · (df)^{-1} (X∘f); valid only where df is invertible.
VecD piola_transform_inverse_form_at(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p);
/// Piola(X) with its exact Jacobian.
FieldJet piola_transform_jet(const SmoothMap& map, const VectorFieldOnChart& x, const PointState& s);

struct PointResidual {
  double residual = 0.0;  // normalized
  double absolute = 0.0;
  double scale = 1.0;     // 1 + largest constituent
  bool skipped = false;
  std::string note;
};

inline constexpr double kDiffeoGuard = 1e-6;

/// |div Piola(X) − (div X ∘ f) Det df|; skipped where |Det df| < kDiffeoGuard.
PointResidual residual_marsden_hughes(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p);
/// |div Piola(X) − (div X ∘ f) Det df + ⟨X∘f, δ Cof df⟩_h|.
PointResidual residual_generalized(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p);

struct CoordinateResidual {
  VecD full;
  VecD simplified;
  double scale = 1.0;
};
/// full_γ = −(1/√|h∘f|) ∂_j(cof[df]_{γj} √|h∘f|) + Γ^β_{βγ}(f) det[df],
/// simplified_γ = ∂_j cof[df]_{γj}.
CoordinateResidual residual_coordinate(const SmoothMap& map, std::span<const double> p);
/// ∂_j(√|h∘f| cof[df]_{δj}).
VecD residual_mh83_published(const SmoothMap& map, std::span<const double> p);
/// max_γ |Γ^β_{βγ} − ∂_γ√|h| / √|h||, normalized.
double christoffel_trace_residual(const Chart& chart, std::span<const double> q);

// ---------------------------------------------------------------------------
// Cofactor as the derivative of the determinant

/// A bundle map A: E -> F at a point, with everything needed to
/// differentiate it along a direction X: X(A), X(G_E), X(G_F), and the
/// connection matrices Ω = Γ(X), so that ∇_X A = X(A) − A Ω_E + Ω_F A.
struct BundleJet {
  MatD a, da;
  MatD ge, dge;
  MatD gf, dgf;
  MatD omega_e, omega_f;
};

struct CofDerivativeResult {
  double lhs = 0.0;  // X(Det A), exact
  double rhs = 0.0;  // ⟨Cof A, ∇_X A⟩
  double residual = 0.0;
};

CofDerivativeResult cof_derivative_residual(const BundleJet& jet);
BundleJet df_bundle_jet(const SmoothMap& map, std::span<const double> p, const VecD& x);

/// Matrix field A(p): E -> F over a chart with Gram fields for E and F and
/// the metric connections Γ_k = ½ G^{-1} ∂_k G.
class SyntheticBundle {
 public:
  SyntheticBundle(int dim, std::vector<std::vector<Expr>> a, std::vector<std::vector<Expr>> ge,
                  std::vector<std::vector<Expr>> gf);
  int dim() const { return dim_; }
  BundleJet jet(std::span<const double> p, const VecD& x) const;
  double det_at(std::span<const double> p) const;

 private:
  static MatD eval_matrix(const std::vector<Expr>& m, int d, std::span<const double> p);
  static MatD eval_directional(const std::vector<Expr>& partials, int d, std::span<const double> p, const VecD& x);
  MatD canonical_connection(const std::vector<Expr>& g, const std::vector<Expr>& dg, std::span<const double> p,
                            const VecD& x) const;

  int dim_;
  std::vector<Expr> a_, ge_, gf_;
  std::vector<Expr> da_, dge_, dgf_;  // [k][i][j]
};

/// Log-log least-squares slope of the central-difference error of X(Det A).
struct FdSlopeResult {
  std::vector<double> steps;
  std::vector<double> errors;
  double slope = 0.0;
};
FdSlopeResult fd_slope_check(const SyntheticBundle& bundle, std::span<const double> p, const VecD& x,
                             const std::vector<double>& steps);

// ---------------------------------------------------------------------------
// Hodge star and metric connections

/// Derivation extension of a connection matrix Ω to Λ_k.
MatD derivation_matrix(const MatD& omega, int k);

/// ‖⋆(∇_X β) − ∇_X(⋆β)‖∞ for a k-vector field β on the chart's tangent
/// bundle with the Levi-Civita connection, optionally perturbed.
struct ConnectionPerturbation {
  int upper = 0, lower_i = 0, lower_j = 0;
  double amount = 0.0;
};
double hodge_parallel_residual(const Chart& chart, std::span<const double> p, const VecD& x, int k,
                               const std::vector<Expr>& beta,
                               const std::optional<ConnectionPerturbation>& perturbation = std::nullopt);

}  // namespace piola
