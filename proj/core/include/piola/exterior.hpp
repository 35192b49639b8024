#pragma once

// Pointwise multilinear algebra over oriented inner-product spaces: wedge
// products and wedge powers of linear maps, Hodge duals in arbitrary (non
// orthonormal) working bases, and the intrinsic determinant and cofactor.
//
// Everything is templated on the scalar so the same code runs on double and
// on Dual; the Dual instantiation carries exact first derivatives of every
// quantity with respect to one seeded direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "piola/dense.hpp"

namespace piola {

using MultiIndex = std::vector<int>;

inline constexpr int kMaxExteriorDim = 8;

/// Strictly increasing k-subsets of {0..d-1} in lexicographic order.
const std::vector<MultiIndex>& multi_indices(int d, int k);

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

/// Position of a strictly increasing multi-index in multi_indices(d, k).
int multi_index_position(int d, const MultiIndex& index);

/// Sign of the permutation that sorts the concatenation (first, second);
/// 0 if the two index sets overlap.
int shuffle_sign(const MultiIndex& first, const MultiIndex& second);

class ExteriorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A d-dimensional real inner-product space presented through a working basis
/// with Gram matrix G, and an orientation sign telling whether that working
/// basis is positively oriented.
template <class S>
class OrientedInnerProductSpace {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;
  static constexpr double kMinPivot = 1e-10;

  OrientedInnerProductSpace(Mat<S> gram, int orientation = +1) : gram_(std::move(gram)), orientation_(orientation) {
    const Eigen::Index d = gram_.rows();
    if (d < 1 || gram_.cols() != d) throw ExteriorError("gram matrix must be square with dim >= 1");
    if (d > kMaxExteriorDim) throw ExteriorError("dimension exceeds supported maximum");
    if (orientation != 1 && orientation != -1) throw ExteriorError("orientation must be +1 or -1");
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j)
        if (std::abs(value_of(gram_(i, j)) - value_of(gram_(j, i))) > kSymmetryTolerance)
          throw ExteriorError("gram matrix not symmetric");
    Mat<S> lower;
    try {
      lower = cholesky_lower<S>(gram_, kMinPivot);
    } catch (const SingularMatrixError&) {
      throw ExteriorError("gram matrix not positive definite");
    }
    // Columns of frame_ are a positively oriented orthonormal basis written in
    // the working basis: frame_^T G frame_ = I.
    coframe_ = transposed<S>(lower);
    frame_ = inverse<S>(coframe_);
    if (orientation_ < 0) {
      frame_.col(d - 1) = -frame_.col(d - 1);
      coframe_.row(d - 1) = -coframe_.row(d - 1);
    }
  }

  static OrientedInnerProductSpace euclidean(int d) { return OrientedInnerProductSpace(identity<S>(d), +1); }

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Mat<S>& gram() const { return gram_; }
  int orientation() const { return orientation_; }
  /// Orthonormal, positively oriented basis vectors as columns.
  const Mat<S>& orthonormal_frame() const { return frame_; }
  /// Inverse of orthonormal_frame(): working coordinates -> orthonormal coordinates.
  const Mat<S>& orthonormal_coframe() const { return coframe_; }

  S inner(const Vec<S>& u, const Vec<S>& v) const {
    S acc(0.0);
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) acc += u(i) * gram_(i, j) * v(j);
    return acc;
  }

 private:
  Mat<S> gram_;
  int orientation_;
  Mat<S> frame_;
  Mat<S> coframe_;
};

template <class S>
bool same_space(const OrientedInnerProductSpace<S>& a, const OrientedInnerProductSpace<S>& b) {
  if (a.dim() != b.dim() || a.orientation() != b.orientation()) return false;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (value_of(a.gram()(i, j)) != value_of(b.gram()(i, j))) return false;
  return true;
}

/// Degree-k multivector, coefficients on the basis e_I of Λ_k in
/// lexicographic multi-index order.
template <class S>
struct KVector {
  std::shared_ptr<const OrientedInnerProductSpace<S>> space;
  int degree = 0;
  Vec<S> coeffs;

  KVector(std::shared_ptr<const OrientedInnerProductSpace<S>> sp, int k, Vec<S> c)
      : space(std::move(sp)), degree(k), coeffs(std::move(c)) {
    if (!space) throw ExteriorError("k-vector without a space");
    if (k < 0 || k > space->dim()) throw ExteriorError("degree out of range");
    if (coeffs.size() != binomial(space->dim(), k)) throw ExteriorError("coefficient count must be C(d,k)");
  }

  /// The basis k-vector e_I.
  static KVector basis(std::shared_ptr<const OrientedInnerProductSpace<S>> sp, const MultiIndex& index) {
    const int d = sp->dim();
    const int k = static_cast<int>(index.size());
    Vec<S> c = Vec<S>::Constant(binomial(d, k), S(0.0));
    c(multi_index_position(d, index)) = S(1.0);
    return KVector(std::move(sp), k, std::move(c));
  }
};

/// A linear map between two oriented inner-product spaces of equal dimension.
/// matrix(a, i) is the a-th working coordinate of A applied to the i-th
/// source basis vector.
template <class S>
struct LinearMap {
  OrientedInnerProductSpace<S> source;
  OrientedInnerProductSpace<S> target;
  Mat<S> matrix;

  LinearMap(OrientedInnerProductSpace<S> src, OrientedInnerProductSpace<S> tgt, Mat<S> m)
      : source(std::move(src)), target(std::move(tgt)), matrix(std::move(m)) {
    if (source.dim() != target.dim()) throw ExteriorError("source and target dimensions differ");
    if (matrix.rows() != target.dim() || matrix.cols() != source.dim())
      throw ExteriorError("matrix shape does not match spaces");
  }

  int dim() const { return source.dim(); }
  Vec<S> apply(const Vec<S>& v) const { return matvec<S>(matrix, v); }
};

template <class S>
KVector<S> wedge(const KVector<S>& a, const KVector<S>& b) {
  if (!same_space(*a.space, *b.space)) throw ExteriorError("wedge: mismatched spaces");
  const int d = a.space->dim();
  const int k = a.degree + b.degree;
  if (k > d) throw ExteriorError("wedge: degree overflow");
  const auto& left = multi_indices(d, a.degree);
  const auto& right = multi_indices(d, b.degree);
  Vec<S> out = Vec<S>::Constant(binomial(d, k), S(0.0));
  MultiIndex merged;
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      const int sign = shuffle_sign(left[i], right[j]);
      if (sign == 0) continue;
      merged = left[i];
      merged.insert(merged.end(), right[j].begin(), right[j].end());
      std::sort(merged.begin(), merged.end());
      const S term = a.coeffs(static_cast<Eigen::Index>(i)) * b.coeffs(static_cast<Eigen::Index>(j));
      const int pos = multi_index_position(d, merged);
      if (sign > 0) {
        out(pos) += term;
      } else {
        out(pos) -= term;
      }
    }
  }
  return KVector<S>(a.space, k, std::move(out));
}

/// Matrix of ∧^k A on Λ_k: entry (J, I) is the k×k minor of `matrix` with
/// rows J and columns I.
template <class S>
Mat<S> wedge_power_matrix(const Mat<S>& matrix, int k) {
  const int d = static_cast<int>(matrix.rows());
  if (matrix.cols() != d) throw ExteriorError("wedge power of a non-square matrix");
  if (k < 0 || k > d) throw ExteriorError("wedge power degree out of range");
  const auto& idx = multi_indices(d, k);
  const int n = static_cast<int>(idx.size());
  Mat<S> out(n, n);
  if (k == 0) {
    out(0, 0) = S(1.0);
    return out;
  }
  Mat<S> minor(k, k);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) minor(r, c) = matrix(idx[row][r], idx[col][c]);
      out(row, col) = determinant<S>(minor);
    }
  }
  return out;
}

template <class S>
Mat<S> wedge_power_map(const LinearMap<S>& a, int k) {
  return wedge_power_matrix<S>(a.matrix, k);
}

/// Complement rule in a positively oriented orthonormal basis:
/// ⋆ e_I = sign(I, I^c) e_{I^c}.
template <class S>
Mat<S> orthonormal_hodge_matrix(int d, int k) {
  const auto& from = multi_indices(d, k);
  const auto& to = multi_indices(d, d - k);
  Mat<S> out = Mat<S>::Constant(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()), S(0.0));
  MultiIndex complement;
  for (std::size_t i = 0; i < from.size(); ++i) {
    complement.clear();
    for (int m = 0; m < d; ++m)
      if (!std::binary_search(from[i].begin(), from[i].end(), m)) complement.push_back(m);
    out(multi_index_position(d, complement), static_cast<Eigen::Index>(i)) = S(double(shuffle_sign(from[i], complement)));
  }
  return out;
}

/// Matrix of ⋆^k : Λ_k -> Λ_{d-k} in the working basis. Coefficients are moved
/// to the orthonormal frame, complemented, and moved back.
template <class S>
Mat<S> hodge_matrix(const OrientedInnerProductSpace<S>& space, int k) {
  const int d = space.dim();
  if (k < 0 || k > d) throw ExteriorError("hodge star degree out of range");
  const Mat<S> to_orthonormal = wedge_power_matrix<S>(space.orthonormal_coframe(), k);
  const Mat<S> from_orthonormal = wedge_power_matrix<S>(space.orthonormal_frame(), d - k);
  return matmul<S>(from_orthonormal, matmul<S>(orthonormal_hodge_matrix<S>(d, k), to_orthonormal));
}

template <class S>
KVector<S> hodge_star(const std::shared_ptr<const OrientedInnerProductSpace<S>>& space, int k, const KVector<S>& v) {
  if (v.degree != k) throw ExteriorError("hodge_star: degree mismatch");
  if (!same_space(*space, *v.space)) throw ExteriorError("hodge_star: mismatched spaces");
  return KVector<S>(space, space->dim() - k, matvec<S>(hodge_matrix<S>(*space, k), v.coeffs));
}

/// Gram matrix of the induced inner product on Λ_k: <e_I, e_J> = det G[I, J].
template <class S>
Mat<S> exterior_gram(const OrientedInnerProductSpace<S>& space, int k) {
  return wedge_power_matrix<S>(space.gram(), k);
}

/// The unit volume element Vol = ⋆^0(1) as a d-vector coefficient.
template <class S>
S volume_coefficient(const OrientedInnerProductSpace<S>& space) {
  return hodge_matrix<S>(space, 0)(0, 0);
}

/// Det A = ⋆^d_W ∘ ∧^d A ∘ ⋆^0_V applied to 1.
template <class S>
S intrinsic_det(const LinearMap<S>& a) {
  const int d = a.dim();
  const Mat<S> top = wedge_power_matrix<S>(a.matrix, d);
  return hodge_matrix<S>(a.target, d)(0, 0) * top(0, 0) * hodge_matrix<S>(a.source, 0)(0, 0);
}

/// Cof A = (-1)^{d-1} ⋆^{d-1}_W ∘ ∧^{d-1} A ∘ ⋆^1_V, with Λ_1 identified with
/// the space through its working basis.
template <class S>
LinearMap<S> intrinsic_cof(const LinearMap<S>& a) {
  const int d = a.dim();
  Mat<S> m = matmul<S>(hodge_matrix<S>(a.target, d - 1),
                       matmul<S>(wedge_power_matrix<S>(a.matrix, d - 1), hodge_matrix<S>(a.source, 1)));
  if ((d - 1) % 2 == 1) m = -m;
  return LinearMap<S>(a.source, a.target, std::move(m));
}

/// Adjoint with respect to the two inner products: G_V^{-1} A^T G_W.
template <class S>
LinearMap<S> metric_transpose(const LinearMap<S>& a) {
  Mat<S> m = matmul<S>(inverse<S>(a.source.gram()), matmul<S>(transposed<S>(a.matrix), a.target.gram()));
  return LinearMap<S>(a.target, a.source, std::move(m));
}

/// b ∘ a; requires a.target and b.source to be the same space.
template <class S>
LinearMap<S> compose(const LinearMap<S>& b, const LinearMap<S>& a) {
  if (!same_space(a.target, b.source)) throw ExteriorError("compose: middle spaces differ");
  return LinearMap<S>(a.source, b.target, matmul<S>(b.matrix, a.matrix));
}

/// max(‖A^T Cof A − Det A·I‖∞, ‖(Cof A)^T A − Det A·I‖∞).
template <class S>
double laplace_check(const LinearMap<S>& a) {
  const LinearMap<S> cof = intrinsic_cof(a);
  const S det = intrinsic_det(a);
  const Mat<S> left = matmul<S>(metric_transpose(a).matrix, cof.matrix);
  const Mat<S> right = matmul<S>(metric_transpose(cof).matrix, a.matrix);
  double r = 0.0;
  const int d = a.dim();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double expected = i == j ? value_of(det) : 0.0;
      r = std::max(r, std::abs(value_of(left(i, j)) - expected));
      r = std::max(r, std::abs(value_of(right(i, j)) - expected));
    }
  }
  return r;
}

struct RestrictedDetResult {
  double residual = 0.0;
  double restricted_det = 0.0;
};

/// Checks Cof Ã(v⊥) = Det(Ã restricted to {v⊥}^⊥) · w⊥, where the complements
/// carry the orientations induced by (space, unit normal). Throws if v⊥, w⊥
/// are not unit vectors or Ã does not map {v⊥}^⊥ into {w⊥}^⊥.
RestrictedDetResult restricted_det_check(const LinearMap<double>& a, const VecD& v_perp, const VecD& w_perp,
                                         double tolerance = 1e-10);

/// Positively oriented orthonormal basis of {normal}^⊥ (columns), for the
/// orientation induced by (space, normal).
MatD induced_complement_basis(const OrientedInnerProductSpace<double>& space, const VecD& normal);

}  // namespace piola
