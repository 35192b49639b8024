#include "piola/chart.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "piola/exterior.hpp"

namespace piola {

namespace {

std::string format_point(std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

void check_point(int dim, std::span<const double> p) {
  if (static_cast<int>(p.size()) != dim) throw GeometryError("point dimension does not match chart");
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

Box::Box(std::vector<std::pair<double, double>> b) : bounds(std::move(b)) {
  for (const auto& [lo, hi] : bounds)
    if (!(lo < hi)) throw GeometryError("box bounds must satisfy lo < hi");
}

Box Box::cube(int dim, double lo, double hi) {
  return Box(std::vector<std::pair<double, double>>(static_cast<std::size_t>(dim), {lo, hi}));
}

double Box::volume() const {
  double v = 1.0;
  for (const auto& [lo, hi] : bounds) v *= hi - lo;
  return v;
}

double Box::min_side() const {
  double m = INFINITY;
  for (const auto& [lo, hi] : bounds) m = std::min(m, hi - lo);
  return m;
}

bool Box::contains(std::span<const double> p, double slack) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] < bounds[i].first - slack || p[i] > bounds[i].second + slack) return false;
  return true;
}

Box Box::shrunk(double fraction) const {
  std::vector<std::pair<double, double>> b;
  for (const auto& [lo, hi] : bounds) {
    const double margin = fraction * (hi - lo);
    b.emplace_back(lo + margin, hi - margin);
  }
  return Box(std::move(b));
}

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(Box box, std::vector<std::vector<Expr>> metric) : box_(std::move(box)) {
  const int d = box_.dim();
  if (d < 1) throw GeometryError("chart dimension must be at least 1");
  if (static_cast<int>(metric.size()) != d) throw GeometryError("metric must be a dim x dim matrix");
  for (const auto& row : metric) {
    if (static_cast<int>(row.size()) != d) throw GeometryError("metric must be a dim x dim matrix");
    for (const Expr& e : row) {
      if (e.max_var_index() >= d) throw GeometryError("metric references a coordinate beyond the chart dimension");
      metric_.push_back(e);
    }
  }
  metric_partials_.reserve(static_cast<std::size_t>(d * d * d));
  for (int k = 0; k < d; ++k)
    for (const Expr& e : metric_) metric_partials_.push_back(diff(e, k));
}

Chart Chart::euclidean(Box box) {
  const int d = box.dim();
  std::vector<std::vector<Expr>> g(static_cast<std::size_t>(d), std::vector<Expr>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Expr::constant(1.0);
  return Chart(std::move(box), std::move(g));
}

bool Chart::is_cartesian() const {
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      if (!metric_expr(i, j).is_constant(i == j ? 1.0 : 0.0)) return false;
  return true;
}

MatD Chart::metric_at(std::span<const double> p) const {
  check_point(dim(), p);
  const int d = dim();
  MatD g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      g(i, j) = eval(metric_[idx(i, j)], p);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

MatD Chart::inverse_metric_at(std::span<const double> p) const {
  try {
    return inverse<double>(metric_at(p));
  } catch (const SingularMatrixError&) {
    throw GeometryError("metric singular at " + format_point(p));
  }
}

MatD Chart::metric_partial_at(std::span<const double> p, int k) const {
  check_point(dim(), p);
  const int d = dim();
  MatD dg(d, d);
  const std::size_t base = static_cast<std::size_t>(k * d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      dg(i, j) = eval(metric_partials_[base + idx(i, j)], p);
      dg(j, i) = dg(i, j);
    }
  }
  return dg;
}

MatD Chart::metric_derivative_at(std::span<const double> p, std::span<const double> v) const {
  const int d = dim();
  MatD out = MatD::Zero(d, d);
  for (int k = 0; k < d; ++k)
    if (v[static_cast<std::size_t>(k)] != 0.0) out += v[static_cast<std::size_t>(k)] * metric_partial_at(p, k);
  return out;
}

Christoffel Chart::christoffel_at(std::span<const double> p) const {
  const int d = dim();
  const MatD ginv = inverse_metric_at(p);
  std::vector<MatD> dg;
  dg.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) dg.push_back(metric_partial_at(p, k));
  // first kind: Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  Christoffel gamma(static_cast<std::size_t>(d), MatD::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      VecD first(d);
      for (int l = 0; l < d; ++l)
        first(l) = 0.5 * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                          dg[static_cast<std::size_t>(l)](i, j));
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += ginv(k, l) * first(l);
        gamma[static_cast<std::size_t>(k)](i, j) = s;
        gamma[static_cast<std::size_t>(k)](j, i) = s;
      }
    }
  }
  return gamma;
}

double Chart::volume_density_at(std::span<const double> p) const {
  const double det = determinant<double>(metric_at(p));
  if (!(det > 0.0)) throw GeometryError("metric not positive definite at " + format_point(p));
  return std::sqrt(det);
}

MatD Chart::orthonormal_frame_at(std::span<const double> p) const {
  const int d = dim();
  const MatD g = metric_at(p);
  auto inner = [&](const VecD& u, const VecD& v) { return u.dot(g * v); };
  MatD frame(d, d);
  for (int i = 0; i < d; ++i) {
    VecD v = VecD::Zero(d);
    v(i) = 1.0;
    for (int j = 0; j < i; ++j) v -= inner(v, frame.col(j)) * frame.col(j);
    const double n2 = inner(v, v);
    if (!(n2 > 0.0)) throw GeometryError("metric not positive definite at " + format_point(p));
    frame.col(i) = v / std::sqrt(n2);
  }
  return frame;
}

void Chart::validate(int samples, double max_condition) const {
  const int d = dim();
  for (const VecD& x : halton_points(box_, samples, 0, 0.0)) {
    const auto p = as_span(x);
    MatD g(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        double v = 0.0;
        try {
          v = eval(metric_[idx(i, j)], p);
        } catch (const EvalError& e) {
          throw GeometryError("metric not evaluable at sampled point " + format_point(p) + ": " + e.what());
        }
        if (!std::isfinite(v)) throw GeometryError("metric not finite at sampled point " + format_point(p));
        g(i, j) = v;
      }
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (std::abs(g(i, j) - g(j, i)) > 1e-12)
          throw GeometryError("metric not symmetric at sampled point " + format_point(p));
    Eigen::SelfAdjointEigenSolver<MatD> eig(g, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 1e-10)) throw GeometryError("metric not positive definite at sampled point " + format_point(p));
    if (hi / lo > max_condition)
      throw GeometryError("metric condition number exceeds limit at sampled point " + format_point(p));
  }
}

// ---------------------------------------------------------------------------
// Maps and vector fields

ChartMap::ChartMap(std::shared_ptr<const Chart> source, std::shared_ptr<const Chart> target,
                   std::vector<Expr> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  if (!source_ || !target_) throw GeometryError("map requires source and target charts");
  const int d = source_->dim();
  if (target_->dim() != d) throw GeometryError("source and target charts must have equal dimension");
  if (static_cast<int>(components_.size()) != d) throw GeometryError("map must have one component per target coordinate");
  for (const Expr& c : components_)
    if (c.max_var_index() >= d) throw GeometryError("map references a coordinate beyond the source dimension");
  for (const Expr& c : components_)
    for (int i = 0; i < d; ++i) jacobian_.push_back(diff(c, i));
  for (int j = 0; j < d; ++j)
    for (const Expr& c : jacobian_) second_.push_back(diff(c, j));
}

MapJet ChartMap::jet(std::span<const double> p, int order) const {
  const int d = dim();
  check_point(d, p);
  MapJet out;
  out.value.resize(d);
  for (int a = 0; a < d; ++a) out.value(a) = eval(components_[static_cast<std::size_t>(a)], p);
  if (order >= 1) {
    out.jacobian.resize(d, d);
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < d; ++i) out.jacobian(a, i) = eval(jacobian_[static_cast<std::size_t>(a * d + i)], p);
  }
  if (order >= 2) {
    out.second.assign(static_cast<std::size_t>(d), MatD(d, d));
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
          out.second[static_cast<std::size_t>(j)](a, i) =
              eval(second_[static_cast<std::size_t>((j * d + a) * d + i)], p);
  }
  return out;
}

void ChartMap::validate_image(int samples) const {
  for (const VecD& x : halton_points(source_->box(), samples, 0, 0.0)) {
    const VecD fx = jet(as_span(x), 0).value;
    for (int a = 0; a < fx.size(); ++a)
      if (!std::isfinite(fx(a))) throw GeometryError("map not finite at sampled point " + format_point(as_span(x)));
    if (!target_->box().contains(as_span(fx)))
      throw GeometryError("map image leaves the target box at sampled point " + format_point(as_span(x)));
  }
}

VectorFieldOnChart::VectorFieldOnChart(int dim, std::vector<Expr> components)
    : dim_(dim), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != dim_) throw GeometryError("vector field component count must equal dim");
  for (const Expr& c : components_) {
    if (c.max_var_index() >= dim_) throw GeometryError("vector field references a coordinate beyond the chart");
    for (int b = 0; b < dim_; ++b) jacobian_.push_back(diff(c, b));
  }
}

VecD VectorFieldOnChart::value_at(std::span<const double> p) const {
  check_point(dim_, p);
  VecD v(dim_);
  for (int a = 0; a < dim_; ++a) v(a) = eval(components_[static_cast<std::size_t>(a)], p);
  return v;
}

MatD VectorFieldOnChart::jacobian_at(std::span<const double> p) const {
  check_point(dim_, p);
  MatD j(dim_, dim_);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) j(a, b) = eval(jacobian_[static_cast<std::size_t>(a * dim_ + b)], p);
  return j;
}

// ---------------------------------------------------------------------------
// Bump

namespace {

struct BumpJet1D {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

// φ(s) = exp(−1/q), q = s(1−s); derivatives with respect to s.
BumpJet1D bump_1d(double s) {
  if (!(s > 0.0 && s < 1.0)) return {};
  const double q = s * (1.0 - s);
  const double dq = 1.0 - 2.0 * s;
  const double phi = std::exp(-1.0 / q);
  const double du = dq / (q * q);
  const double d2u = (-2.0 * q - 2.0 * dq * dq) / (q * q * q);
  return {phi, phi * du, phi * (du * du + d2u)};
}

}  // namespace

double Bump::value_at(std::span<const double> p) const {
  double v = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto [lo, hi] = box_.bounds[i];
    v *= bump_1d((p[i] - lo) / (hi - lo)).value;
  }
  return v;
}

VecD Bump::gradient_at(std::span<const double> p) const {
  const int d = box_.dim();
  std::vector<BumpJet1D> jets(static_cast<std::size_t>(d));
  std::vector<double> scale(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const auto [lo, hi] = box_.bounds[static_cast<std::size_t>(i)];
    scale[static_cast<std::size_t>(i)] = 1.0 / (hi - lo);
    jets[static_cast<std::size_t>(i)] = bump_1d((p[static_cast<std::size_t>(i)] - lo) / (hi - lo));
  }
  VecD g(d);
  for (int i = 0; i < d; ++i) {
    double v = 1.0;
    for (int m = 0; m < d; ++m) {
      const auto& j = jets[static_cast<std::size_t>(m)];
      v *= (m == i) ? j.first * scale[static_cast<std::size_t>(m)] : j.value;
    }
    g(i) = v;
  }
  return g;
}

MatD Bump::hessian_at(std::span<const double> p) const {
  const int d = box_.dim();
  std::vector<BumpJet1D> jets(static_cast<std::size_t>(d));
  std::vector<double> scale(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const auto [lo, hi] = box_.bounds[static_cast<std::size_t>(i)];
    scale[static_cast<std::size_t>(i)] = 1.0 / (hi - lo);
    jets[static_cast<std::size_t>(i)] = bump_1d((p[static_cast<std::size_t>(i)] - lo) / (hi - lo));
  }
  MatD h(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double v = 1.0;
      for (int m = 0; m < d; ++m) {
        const auto& jm = jets[static_cast<std::size_t>(m)];
        const double s = scale[static_cast<std::size_t>(m)];
        if (m == i && m == j) {
          v *= jm.second * s * s;
        } else if (m == i || m == j) {
          v *= jm.first * s;
        } else {
          v *= jm.value;
        }
      }
      h(i, j) = v;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

std::vector<VecD> halton_points(const Box& box, int count, std::uint64_t seed, double shrink) {
  const int d = box.dim();
  if (d > static_cast<int>(std::size(kPrimes))) throw GeometryError("halton_points: dimension too large");
  const Box inner = shrink > 0.0 ? box.shrunk(shrink) : box;
  // Index 0 is the corner of the box; start past it.
  const std::uint64_t start = 1 + seed % 1000003ULL;
  std::vector<VecD> pts;
  pts.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int n = 0; n < count; ++n) {
    VecD p(d);
    for (int i = 0; i < d; ++i) {
      const auto [lo, hi] = inner.bounds[static_cast<std::size_t>(i)];
      p(i) = lo + (hi - lo) * radical_inverse(start + static_cast<std::uint64_t>(n), kPrimes[i]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace piola
