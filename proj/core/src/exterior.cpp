#include "piola/exterior.hpp"

#include <algorithm>
#include <array>

namespace piola {

namespace {

std::vector<MultiIndex> build_multi_indices(int d, int k) {
  std::vector<MultiIndex> out;
  MultiIndex current(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
  if (k == 0) {
    out.emplace_back();
    return out;
  }
  for (;;) {
    out.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

using Table = std::array<std::array<std::vector<MultiIndex>, kMaxExteriorDim + 1>, kMaxExteriorDim + 1>;

const Table& table() {
  static const Table t = [] {
    Table tab;
    for (int d = 0; d <= kMaxExteriorDim; ++d)
      for (int k = 0; k <= d; ++k) tab[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)] = build_multi_indices(d, k);
    return tab;
  }();
  return t;
}

}  // namespace

const std::vector<MultiIndex>& multi_indices(int d, int k) {
  if (d < 0 || d > kMaxExteriorDim || k < 0 || k > d) throw ExteriorError("multi_indices: (d, k) out of range");
  return table()[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)];
}

int multi_index_position(int d, const MultiIndex& index) {
  const auto& all = multi_indices(d, static_cast<int>(index.size()));
  auto it = std::lower_bound(all.begin(), all.end(), index);
  if (it == all.end() || *it != index) throw ExteriorError("multi_index_position: not a strictly increasing index");
  return static_cast<int>(it - all.begin());
}

int shuffle_sign(const MultiIndex& first, const MultiIndex& second) {
  int inversions = 0;
  for (int a : first) {
    for (int b : second) {
      if (a == b) return 0;
      if (a > b) ++inversions;
    }
  }
  return inversions % 2 == 0 ? 1 : -1;
}

MatD induced_complement_basis(const OrientedInnerProductSpace<double>& space, const VecD& normal) {
  const int d = space.dim();
  const MatD& g = space.gram();
  // Gram-Schmidt on (normal, e_0, ..., e_{d-1}); the working basis vector
  // most aligned with the normal is dropped.
  std::vector<VecD> basis{normal};
  int skip = 0;
  double best = -1.0;
  for (int i = 0; i < d; ++i) {
    VecD e = VecD::Zero(d);
    e(i) = 1.0;
    const double c = std::abs(space.inner(e, normal)) / std::sqrt(g(i, i));
    if (c > best) {
      best = c;
      skip = i;
    }
  }
  for (int i = 0; i < d; ++i) {
    if (i == skip) continue;
    VecD v = VecD::Zero(d);
    v(i) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const VecD& b : basis) v -= space.inner(v, b) * b;
    v /= std::sqrt(space.inner(v, v));
    basis.push_back(v);
  }
  MatD full(d, d);
  for (int i = 0; i < d; ++i) full.col(i) = basis[static_cast<std::size_t>(i)];
  if (d >= 2 && determinant<double>(full) * space.orientation() < 0.0) full.col(d - 1) = -full.col(d - 1);
  return full.rightCols(d - 1);
}

RestrictedDetResult restricted_det_check(const LinearMap<double>& a, const VecD& v_perp, const VecD& w_perp,
                                         double tolerance) {
  const int d = a.dim();
  if (v_perp.size() != d || w_perp.size() != d) throw ExteriorError("restricted_det_check: vector size mismatch");
  if (std::abs(a.source.inner(v_perp, v_perp) - 1.0) > tolerance ||
      std::abs(a.target.inner(w_perp, w_perp) - 1.0) > tolerance)
    throw ExteriorError("restricted_det_check: normals must be unit vectors");

  const MatD v_basis = induced_complement_basis(a.source, v_perp);
  const MatD w_basis = induced_complement_basis(a.target, w_perp);
  MatD restricted(d - 1, d - 1);
  for (int j = 0; j < d - 1; ++j) {
    const VecD image = a.apply(v_basis.col(j));
    if (std::abs(a.target.inner(image, w_perp)) > tolerance * (1.0 + image.cwiseAbs().maxCoeff()))
      throw ExteriorError("restricted_det_check: map does not preserve the hyperplane");
    for (int i = 0; i < d - 1; ++i) restricted(i, j) = a.target.inner(w_basis.col(i), image);
  }
  RestrictedDetResult result;
  result.restricted_det = d == 1 ? 1.0 : determinant<double>(restricted);
  const VecD diff = intrinsic_cof(a).apply(v_perp) - result.restricted_det * w_perp;
  result.residual = std::sqrt(a.target.inner(diff, diff));
  return result;
}

}  // namespace piola
