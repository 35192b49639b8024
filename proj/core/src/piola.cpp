#include "piola/piola.hpp"

#include <algorithm>
#include <cmath>

namespace piola {

namespace {

VecD unit(int d, int i) {
  VecD e = VecD::Zero(d);
  e(i) = 1.0;
  return e;
}

std::size_t uz(int i) { return static_cast<std::size_t>(i); }

/// Exact ∂_k √|G| for every coordinate direction, at q.
VecD sqrt_det_gradient(const Chart& chart, std::span<const double> q) {
  const int d = chart.dim();
  const MatD g = chart.metric_at(q);
  VecD grad(d);
  for (int k = 0; k < d; ++k) {
    const Dual det = determinant<Dual>(make_dual(g, chart.metric_partial_at(q, k)));
    grad(k) = sqrt(det).deriv;
  }
  return grad;
}

/// √|h| at f(p) and its derivative along the source direction v.
Dual seeded_sqrt_h(const Chart& target, const PointState& s, const VecD& v) {
  const VecD jv = s.jacobian * v;
  const MatD dh = target.metric_derivative_at(as_span(s.fp), as_span(jv));
  return sqrt(determinant<Dual>(make_dual(s.h, dh)));
}

}  // namespace

PointState point_state(const SmoothMap& map, std::span<const double> p, int order) {
  const Chart& src = map.source();
  const Chart& tgt = map.target();
  const MapJet jet = map.jet(p, std::max(order, 1));
  PointState s;
  s.p = VecD(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) s.p(static_cast<Eigen::Index>(i)) = p[i];
  s.jacobian = jet.jacobian;
  s.second = jet.second;
  s.fp = jet.value;
  s.g = src.metric_at(p);
  s.g_inv = src.inverse_metric_at(p);
  s.sqrt_g = src.volume_density_at(p);
  const auto q = as_span(s.fp);
  s.h = tgt.metric_at(q);
  s.sqrt_h = tgt.volume_density_at(q);
  s.gamma_src = src.christoffel_at(p);
  s.gamma_tgt = tgt.christoffel_at(q);
  return s;
}

SeededInputs seeded_inputs(const SmoothMap& map, const PointState& s, const VecD& v) {
  const int d = map.dim();
  if (s.second.size() != uz(d)) throw GeometryError("seeded_inputs: point state lacks second derivatives");
  MatD dj = MatD::Zero(d, d);
  for (int j = 0; j < d; ++j)
    if (v(j) != 0.0) dj += v(j) * s.second[uz(j)];
  const MatD dg = map.source().metric_derivative_at(as_span(s.p), as_span(v));
  const VecD jv = s.jacobian * v;
  const MatD dh = map.target().metric_derivative_at(as_span(s.fp), as_span(jv));
  return {make_dual(s.jacobian, dj), make_dual(s.g, dg), make_dual(s.h, dh)};
}

LinearMap<double> differential_at(const SmoothMap& map, std::span<const double> p) {
  const MapJet jet = map.jet(p, 1);
  return make_differential<double>(jet.jacobian, map.source().metric_at(p), map.target().metric_at(as_span(jet.value)));
}

double det_df_at(const SmoothMap& map, std::span<const double> p) { return intrinsic_det(differential_at(map, p)); }

double coordinate_det_df_at(const SmoothMap& map, std::span<const double> p) {
  const MapJet jet = map.jet(p, 1);
  const double sqrt_h = map.target().volume_density_at(as_span(jet.value));
  return sqrt_h / map.source().volume_density_at(p) * determinant<double>(jet.jacobian);
}

MatD cof_df_at(const SmoothMap& map, std::span<const double> p) { return intrinsic_cof(differential_at(map, p)).matrix; }

double coordinate_cof_identity_residual(const SmoothMap& map, std::span<const double> p) {
  const int d = map.dim();
  const MapJet jet = map.jet(p, 1);
  const MatD g = map.source().metric_at(p);
  const MatD g_inv = map.source().inverse_metric_at(p);
  const MatD h = map.target().metric_at(as_span(jet.value));
  const MatD cof = intrinsic_cof(make_differential<double>(jet.jacobian, g, h)).matrix;
  const double ratio = map.target().volume_density_at(as_span(jet.value)) / map.source().volume_density_at(p);
  const MatD adj = matrix_cofactor<double>(jet.jacobian);
  double r = 0.0;
  for (int j = 0; j < d; ++j) {
    for (int b = 0; b < d; ++b) {
      double lhs = 0.0;
      for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a) lhs += g_inv(i, j) * h(a, b) * cof(a, i);
      r = std::max(r, std::abs(lhs - ratio * adj(b, j)));
    }
  }
  return r;
}

CofDirectional cof_df_directional(const SmoothMap& map, const PointState& s, const VecD& v) {
  const SeededInputs in = seeded_inputs(map, s, v);
  const Mat<Dual> cof = intrinsic_cof(make_differential<Dual>(in.jacobian, in.g, in.h)).matrix;
  return {values(cof), derivs(cof)};
}

CovariantCof covariant_derivative_cof(const SmoothMap& map, const PointState& s) {
  const int d = map.dim();
  CovariantCof out;
  out.partial.reserve(uz(d));
  for (int i = 0; i < d; ++i) {
    CofDirectional c = cof_df_directional(map, s, unit(d, i));
    if (i == 0) out.cof = c.value;
    out.partial.push_back(std::move(c.derivative));
  }
  const MatD& cof = out.cof;
  out.nabla.assign(uz(d), MatD::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int a = 0; a < d; ++a) {
      for (int j = 0; j < d; ++j) {
        double v = out.partial[uz(i)](a, j);
        for (int k = 0; k < d; ++k) v -= s.gamma_src[uz(k)](i, j) * cof(a, k);
        for (int b = 0; b < d; ++b)
          for (int c = 0; c < d; ++c) v += s.gamma_tgt[uz(a)](b, c) * s.jacobian(b, i) * cof(c, j);
        out.nabla[uz(i)](a, j) = v;
      }
    }
  }
  return out;
}

std::vector<MatD> covariant_derivative_cof_at(const SmoothMap& map, std::span<const double> p) {
  return covariant_derivative_cof(map, point_state(map, p)).nabla;
}

Coderivative coderivative_cof_at(const SmoothMap& map, std::span<const double> p) {
  const int d = map.dim();
  const PointState s = point_state(map, p);
  const CovariantCof cc = covariant_derivative_cof(map, s);
  Coderivative out{VecD::Zero(d), 0.0};
  for (int a = 0; a < d; ++a) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const double w = s.g_inv(i, j);
        acc -= w * cc.nabla[uz(i)](a, j);
        out.scale = std::max(out.scale, std::abs(w * cc.partial[uz(i)](a, j)));
        out.scale = std::max(out.scale, std::abs(w * (cc.nabla[uz(i)](a, j) - cc.partial[uz(i)](a, j))));
      }
    }
    out.value(a) = acc;
  }
  out.scale = std::max(out.scale, max_abs(cc.cof));
  return out;
}

VecD coderivative_cof_frame_at(const SmoothMap& map, std::span<const double> p) {
  const int d = map.dim();
  const PointState s = point_state(map, p);
  const MatD frame = map.source().orthonormal_frame_at(p);
  VecD out = VecD::Zero(d);
  for (int a = 0; a < d; ++a) {
    const VecD e = frame.col(a);
    const CofDirectional c = cof_df_directional(map, s, e);
    // ∇_e e in coordinates, without the ∂ part (the frame is held fixed).
    VecD nabla_ee = VecD::Zero(d);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) nabla_ee(k) += s.gamma_src[uz(k)](i, j) * e(i) * e(j);
    const VecD je = s.jacobian * e;
    const VecD ce = c.value * e;
    const VecD term = c.derivative * e - c.value * nabla_ee;
    for (int al = 0; al < d; ++al) {
      double conn = 0.0;
      for (int b = 0; b < d; ++b)
        for (int g = 0; g < d; ++g) conn += s.gamma_tgt[uz(al)](b, g) * je(b) * ce(g);
      out(al) -= term(al) + conn;
    }
  }
  return out;
}

Coderivative euclidean_div_cof_at(const SmoothMap& map, std::span<const double> p) {
  const int d = map.dim();
  const MapJet jet = map.jet(p, 2);
  Coderivative out{VecD::Zero(d), 0.0};
  out.scale = max_abs(matrix_cofactor<double>(jet.jacobian));
  for (int i = 0; i < d; ++i) {
    const Mat<Dual> cof = matrix_cofactor<Dual>(make_dual(jet.jacobian, jet.second[uz(i)]));
    for (int a = 0; a < d; ++a) {
      out.value(a) += cof(a, i).deriv;
      out.scale = std::max(out.scale, std::abs(cof(a, i).deriv));
    }
  }
  return out;
}

double divergence_volume_form(const Chart& chart, std::span<const double> p, const FieldJet& x) {
  const int d = chart.dim();
  const double root = chart.volume_density_at(p);
  const VecD grad = sqrt_det_gradient(chart, p);
  double acc = 0.0;
  for (int i = 0; i < d; ++i) acc += grad(i) * x.value(i) + root * x.jacobian(i, i);
  return acc / root;
}

double divergence_christoffel_form(const Chart& chart, std::span<const double> p, const FieldJet& x) {
  const int d = chart.dim();
  const Christoffel gamma = chart.christoffel_at(p);
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    acc += x.jacobian(i, i);
    for (int k = 0; k < d; ++k) acc += gamma[uz(i)](i, k) * x.value(k);
  }
  return acc;
}

double divergence_at(const Chart& chart, const VectorFieldOnChart& x, std::span<const double> p) {
  return divergence_volume_form(chart, p, FieldJet{x.value_at(p), x.jacobian_at(p)});
}

VecD piola_transform_at(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p) {
  const LinearMap<double> df = differential_at(map, p);
  const VecD xf = x.value_at(as_span(map.jet(p, 0).value));
  return metric_transpose(intrinsic_cof(df)).apply(xf);
}

VecD piola_transform_inverse_form_at(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p) {
  const LinearMap<double> df = differential_at(map, p);
  const VecD xf = x.value_at(as_span(map.jet(p, 0).value));
  return intrinsic_det(df) * matvec<double>(inverse<double>(df.matrix), xf);
}

FieldJet piola_transform_jet(const SmoothMap& map, const VectorFieldOnChart& x, const PointState& s) {
  const int d = map.dim();
  const VecD xf = x.value_at(as_span(s.fp));
  const MatD dx = x.jacobian_at(as_span(s.fp));
  FieldJet out{VecD::Zero(d), MatD::Zero(d, d)};
  for (int i = 0; i < d; ++i) {
    const VecD e = unit(d, i);
    const SeededInputs in = seeded_inputs(map, s, e);
    const LinearMap<Dual> df = make_differential<Dual>(in.jacobian, in.g, in.h);
    const Vec<Dual> xd = make_dual(xf, dx * (s.jacobian * e));
    const Vec<Dual> pd = metric_transpose(intrinsic_cof(df)).apply(xd);
    for (int a = 0; a < d; ++a) {
      if (i == 0) out.value(a) = pd(a).value;
      out.jacobian(a, i) = pd(a).deriv;
    }
  }
  return out;
}

namespace {

struct PiolaTerms {
  double div_piola = 0.0;
  double pulled = 0.0;  // (div X ∘ f) Det df
  double det = 0.0;
  double scale = 0.0;
  PointState state;
};

PiolaTerms piola_terms(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p) {
  PiolaTerms t;
  t.state = point_state(map, p);
  const FieldJet pj = piola_transform_jet(map, x, t.state);
  t.div_piola = divergence_volume_form(map.source(), p, pj);
  t.det = intrinsic_det(make_differential<double>(t.state.jacobian, t.state.g, t.state.h));
  t.pulled = divergence_at(map.target(), x, as_span(t.state.fp)) * t.det;
  t.scale = std::max({std::abs(t.div_piola), std::abs(t.pulled), max_abs(pj.jacobian)});
  return t;
}

}  // namespace

PointResidual residual_marsden_hughes(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p) {
  PointResidual r;
  const double det = det_df_at(map, p);
  if (std::abs(det) < kDiffeoGuard) {
    r.skipped = true;
    r.note = "|Det df| below diffeomorphism guard";
    return r;
  }
  const PiolaTerms t = piola_terms(map, x, p);
  r.absolute = std::abs(t.div_piola - t.pulled);
  r.scale = 1.0 + t.scale;
  r.residual = r.absolute / r.scale;
  return r;
}

PointResidual residual_generalized(const SmoothMap& map, const VectorFieldOnChart& x, std::span<const double> p) {
  PointResidual r;
  const PiolaTerms t = piola_terms(map, x, p);
  const Coderivative delta = coderivative_cof_at(map, p);
  const VecD xf = x.value_at(as_span(t.state.fp));
  const double pairing = xf.dot(t.state.h * delta.value);
  r.absolute = std::abs(t.div_piola - t.pulled + pairing);
  r.scale = 1.0 + std::max(t.scale, std::abs(pairing));
  r.residual = r.absolute / r.scale;
  return r;
}

CoordinateResidual residual_coordinate(const SmoothMap& map, std::span<const double> p) {
  const int d = map.dim();
  const PointState s = point_state(map, p);
  CoordinateResidual out{VecD::Zero(d), VecD::Zero(d), 0.0};
  const double det = determinant<double>(s.jacobian);
  for (int j = 0; j < d; ++j) {
    const Mat<Dual> adj = matrix_cofactor<Dual>(make_dual(s.jacobian, s.second[uz(j)]));
    const Dual root = seeded_sqrt_h(map.target(), s, unit(d, j));
    for (int c = 0; c < d; ++c) {
      const Dual weighted = adj(c, j) * root;
      out.simplified(c) += adj(c, j).deriv;
      out.full(c) -= weighted.deriv / s.sqrt_h;
      out.scale = std::max({out.scale, std::abs(adj(c, j).deriv), std::abs(weighted.deriv / s.sqrt_h)});
    }
  }
  for (int c = 0; c < d; ++c) {
    double trace = 0.0;
    for (int b = 0; b < d; ++b) trace += s.gamma_tgt[uz(b)](b, c);
    out.full(c) += trace * det;
    out.scale = std::max(out.scale, std::abs(trace * det));
  }
  return out;
}

VecD residual_mh83_published(const SmoothMap& map, std::span<const double> p) {
  const int d = map.dim();
  const PointState s = point_state(map, p);
  VecD out = VecD::Zero(d);
  for (int j = 0; j < d; ++j) {
    const Mat<Dual> adj = matrix_cofactor<Dual>(make_dual(s.jacobian, s.second[uz(j)]));
    const Dual root = seeded_sqrt_h(map.target(), s, unit(d, j));
    for (int c = 0; c < d; ++c) out(c) += (root * adj(c, j)).deriv;
  }
  return out;
}

double christoffel_trace_residual(const Chart& chart, std::span<const double> q) {
  const int d = chart.dim();
  const Christoffel gamma = chart.christoffel_at(q);
  const VecD grad = sqrt_det_gradient(chart, q);
  const double root = chart.volume_density_at(q);
  double r = 0.0;
  for (int c = 0; c < d; ++c) {
    double trace = 0.0;
    for (int b = 0; b < d; ++b) trace += gamma[uz(b)](b, c);
    const double log_grad = grad(c) / root;
    r = std::max(r, std::abs(trace - log_grad) / (1.0 + std::max(std::abs(trace), std::abs(log_grad))));
  }
  return r;
}

// ---------------------------------------------------------------------------

CofDerivativeResult cof_derivative_residual(const BundleJet& jet) {
  const int d = static_cast<int>(jet.a.rows());
  const LinearMap<Dual> a = make_differential<Dual>(make_dual(jet.a, jet.da), make_dual(jet.ge, jet.dge),
                                                     make_dual(jet.gf, jet.dgf));
  CofDerivativeResult r;
  r.lhs = intrinsic_det(a).deriv;
  const MatD cof = values(intrinsic_cof(a).matrix);
  const MatD nabla = jet.da - jet.a * jet.omega_e + jet.omega_f * jet.a;
  const MatD ge_inv = inverse<double>(jet.ge);
  double acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int al = 0; al < d; ++al)
        for (int be = 0; be < d; ++be) acc += ge_inv(i, j) * jet.gf(al, be) * cof(al, i) * nabla(be, j);
  r.rhs = acc;
  r.residual = std::abs(r.lhs - r.rhs) / (1.0 + std::max(std::abs(r.lhs), std::abs(r.rhs)));
  return r;
}

BundleJet df_bundle_jet(const SmoothMap& map, std::span<const double> p, const VecD& x) {
  const int d = map.dim();
  const PointState s = point_state(map, p);
  const SeededInputs in = seeded_inputs(map, s, x);
  BundleJet jet;
  jet.a = s.jacobian;
  jet.da = derivs(in.jacobian);
  jet.ge = s.g;
  jet.dge = derivs(in.g);
  jet.gf = s.h;
  jet.dgf = derivs(in.h);
  const VecD jx = s.jacobian * x;
  jet.omega_e = MatD::Zero(d, d);
  jet.omega_f = MatD::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int k = 0; k < d; ++k) {
        jet.omega_e(a, b) += s.gamma_src[uz(a)](k, b) * x(k);
        jet.omega_f(a, b) += s.gamma_tgt[uz(a)](k, b) * jx(k);
      }
    }
  }
  return jet;
}

SyntheticBundle::SyntheticBundle(int dim, std::vector<std::vector<Expr>> a, std::vector<std::vector<Expr>> ge,
                                 std::vector<std::vector<Expr>> gf)
    : dim_(dim) {
  auto flatten = [dim](const std::vector<std::vector<Expr>>& m, const char* what) {
    if (static_cast<int>(m.size()) != dim) throw GeometryError(std::string(what) + " must be dim x dim");
    std::vector<Expr> out;
    for (const auto& row : m) {
      if (static_cast<int>(row.size()) != dim) throw GeometryError(std::string(what) + " must be dim x dim");
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  };
  a_ = flatten(a, "bundle map");
  ge_ = flatten(ge, "source bundle metric");
  gf_ = flatten(gf, "target bundle metric");
  for (int k = 0; k < dim_; ++k) {
    for (const Expr& e : a_) da_.push_back(diff(e, k));
    for (const Expr& e : ge_) dge_.push_back(diff(e, k));
    for (const Expr& e : gf_) dgf_.push_back(diff(e, k));
  }
}

MatD SyntheticBundle::eval_matrix(const std::vector<Expr>& m, int d, std::span<const double> p) {
  MatD out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = eval(m[uz(i * d + j)], p);
  return out;
}

MatD SyntheticBundle::eval_directional(const std::vector<Expr>& partials, int d, std::span<const double> p,
                                       const VecD& x) {
  MatD out = MatD::Zero(d, d);
  const std::size_t block = uz(d * d);
  for (int k = 0; k < d; ++k) {
    if (x(k) == 0.0) continue;
    const std::vector<Expr> slice(partials.begin() + static_cast<std::ptrdiff_t>(block * uz(k)),
                                  partials.begin() + static_cast<std::ptrdiff_t>(block * uz(k + 1)));
    out += x(k) * eval_matrix(slice, d, p);
  }
  return out;
}

MatD SyntheticBundle::canonical_connection(const std::vector<Expr>& g, const std::vector<Expr>& dg,
                                           std::span<const double> p, const VecD& x) const {
  const MatD gv = eval_matrix(g, dim_, p);
  return 0.5 * inverse<double>(gv) * eval_directional(dg, dim_, p, x);
}

BundleJet SyntheticBundle::jet(std::span<const double> p, const VecD& x) const {
  BundleJet j;
  j.a = eval_matrix(a_, dim_, p);
  j.da = eval_directional(da_, dim_, p, x);
  j.ge = eval_matrix(ge_, dim_, p);
  j.dge = eval_directional(dge_, dim_, p, x);
  j.gf = eval_matrix(gf_, dim_, p);
  j.dgf = eval_directional(dgf_, dim_, p, x);
  j.omega_e = canonical_connection(ge_, dge_, p, x);
  j.omega_f = canonical_connection(gf_, dgf_, p, x);
  return j;
}

double SyntheticBundle::det_at(std::span<const double> p) const {
  return intrinsic_det(make_differential<double>(eval_matrix(a_, dim_, p), eval_matrix(ge_, dim_, p),
                                                 eval_matrix(gf_, dim_, p)));
}

FdSlopeResult fd_slope_check(const SyntheticBundle& bundle, std::span<const double> p, const VecD& x,
                             const std::vector<double>& steps) {
  const CofDerivativeResult exact = cof_derivative_residual(bundle.jet(p, x));
  FdSlopeResult r;
  r.steps = steps;
  const int d = bundle.dim();
  for (double h : steps) {
    VecD plus(d), minus(d);
    for (int i = 0; i < d; ++i) {
      plus(i) = p[uz(i)] + h * x(i);
      minus(i) = p[uz(i)] - h * x(i);
    }
    const double fd = (bundle.det_at(as_span(plus)) - bundle.det_at(as_span(minus))) / (2.0 * h);
    r.errors.push_back(std::abs(fd - exact.rhs));
  }
  // least-squares fit of log e = s log h + c
  const double n = static_cast<double>(steps.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double lx = std::log10(steps[i]);
    const double ly = std::log10(r.errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return r;
}

// ---------------------------------------------------------------------------

MatD derivation_matrix(const MatD& omega, int k) {
  const auto d = omega.rows();
  return derivs(wedge_power_matrix<Dual>(make_dual(MatD::Identity(d, d), omega), k));
}

double hodge_parallel_residual(const Chart& chart, std::span<const double> p, const VecD& x, int k,
                               const std::vector<Expr>& beta,
                               const std::optional<ConnectionPerturbation>& perturbation) {
  const int d = chart.dim();
  if (static_cast<int>(beta.size()) != binomial(d, k)) throw GeometryError("k-vector field has wrong coefficient count");
  const MatD g = chart.metric_at(p);
  const MatD dg = chart.metric_derivative_at(p, as_span(x));
  Christoffel gamma = chart.christoffel_at(p);
  if (perturbation) gamma[uz(perturbation->upper)](perturbation->lower_i, perturbation->lower_j) += perturbation->amount;
  MatD omega = MatD::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int m = 0; m < d; ++m) omega(a, b) += gamma[uz(a)](m, b) * x(m);

  const int n = binomial(d, k);
  Vec<Dual> b(n);
  for (int i = 0; i < n; ++i) b(i) = eval_dual(beta[uz(i)], p, as_span(x));

  const OrientedInnerProductSpace<Dual> space(make_dual(g, dg), +1);
  const Mat<Dual> star = hodge_matrix<Dual>(space, k);
  const Vec<Dual> star_b = matvec<Dual>(star, b);

  const VecD bv = values(Mat<Dual>(b));
  const VecD nabla_b = derivs(Mat<Dual>(b)) + derivation_matrix(omega, k) * bv;
  const VecD lhs = values(star) * nabla_b;
  const VecD sb = values(Mat<Dual>(star_b));
  const VecD rhs = derivs(Mat<Dual>(star_b)) + derivation_matrix(omega, d - k) * sb;
  const double scale = 1.0 + std::max(max_abs(lhs), max_abs(rhs));
  return max_abs(VecD(lhs - rhs)) / scale;
}

}  // namespace piola
