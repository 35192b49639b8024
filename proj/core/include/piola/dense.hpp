#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>

#include <Eigen/Core>

#include "piola/dual.hpp"

namespace piola {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatD = Mat<double>;
using VecD = Vec<double>;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense kernels over a generic scalar. Products are written as explicit loops
// with a fixed summation order so that double and Dual instantiations perform
// identical floating-point operations on the value component.

template <class S>
Mat<S> matmul(const Mat<S>& a, const Mat<S>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Mat<S> c(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      S acc(0.0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

template <class S>
Vec<S> matvec(const Mat<S>& a, const Vec<S>& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
  Vec<S> y(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    S acc(0.0);
    for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * x(k);
    y(i) = acc;
  }
  return y;
}

template <class S>
Mat<S> transposed(const Mat<S>& a) {
  return a.transpose();
}

template <class S>
Mat<S> identity(Eigen::Index n) {
  Mat<S> m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = S(i == j ? 1.0 : 0.0);
  return m;
}

template <class S>
Mat<S> scaled(const Mat<S>& a, const S& s) {
  Mat<S> r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) * s;
  return r;
}

template <class S>
Mat<S> matrix_cofactor(const Mat<S>& a);

/// Determinant by LU with partial pivoting (pivot choice on the value part).
/// A Dual matrix whose value part is singular still has a derivative,
/// d det = Σ cof(A)_ij dA_ij, which elimination cannot see; that case falls
/// back to the cofactor expansion.
template <class S>
S determinant(Mat<S> a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("determinant: matrix not square");
  [[maybe_unused]] const Mat<S> original = [&] {
    if constexpr (std::is_same_v<S, Dual>) return a;
    return Mat<S>();
  }();
  S det(1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    double best = std::abs(value_of(a(k, k)));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double v = std::abs(value_of(a(i, k)));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) {
      if constexpr (std::is_same_v<S, Dual>) {
        double deriv = 0.0;
        if (n == 1) {
          deriv = original(0, 0).deriv;
        } else {
          const Mat<double> cof = matrix_cofactor<double>(values(original));
          for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) deriv += cof(i, j) * original(i, j).deriv;
        }
        return Dual(0.0, deriv);
      }
      return S(0.0);
    }
    if (piv != k) {
      a.row(k).swap(a.row(piv));
      det = -det;
    }
    det *= a(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const S factor = a(i, k) / a(k, k);
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  return det;
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
template <class S>
Mat<S> inverse(Mat<S> a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("inverse: matrix not square");
  Mat<S> inv = identity<S>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    double best = std::abs(value_of(a(k, k)));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double v = std::abs(value_of(a(i, k)));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) throw SingularMatrixError("inverse: singular matrix");
    if (piv != k) {
      a.row(k).swap(a.row(piv));
      inv.row(k).swap(inv.row(piv));
    }
    const S p = a(k, k);
    for (Eigen::Index j = 0; j < n; ++j) {
      a(k, j) /= p;
      inv(k, j) /= p;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == k) continue;
      const S factor = a(i, k);
      for (Eigen::Index j = 0; j < n; ++j) {
        a(i, j) -= factor * a(k, j);
        inv(i, j) -= factor * inv(k, j);
      }
    }
  }
  return inv;
}

/// Lower Cholesky factor L with G = L L^T. Throws if a pivot is not positive.
template <class S>
Mat<S> cholesky_lower(const Mat<S>& g, double min_pivot = 0.0) {
  const Eigen::Index n = g.rows();
  Mat<S> l = Mat<S>::Constant(n, n, S(0.0));
  for (Eigen::Index j = 0; j < n; ++j) {
    S diag = g(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(value_of(diag) > min_pivot))
      throw SingularMatrixError("cholesky: matrix not positive definite");
    using std::sqrt;
    l(j, j) = sqrt(diag);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      S s = g(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// Matrix of signed minors: cof(A)(i,j) = (-1)^{i+j} det(A without row i, col j).
template <class S>
Mat<S> matrix_cofactor(const Mat<S>& a) {
  const Eigen::Index n = a.rows();
  Mat<S> c(n, n);
  if (n == 1) {
    c(0, 0) = S(1.0);
    return c;
  }
  Mat<S> minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index s = 0, ss = 0; s < n; ++s) {
          if (s == j) continue;
          minor(rr, ss) = a(r, s);
          ++ss;
        }
        ++rr;
      }
      const S m = determinant<S>(minor);
      c(i, j) = ((i + j) % 2 == 0) ? m : -m;
    }
  }
  return c;
}

/// Largest absolute entry.
template <class S>
double max_abs(const Mat<S>& a) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(value_of(a(i, j))));
  return m;
}

template <class S>
double max_abs(const Vec<S>& a) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(value_of(a(i))));
  return m;
}

template <class S>
MatD values(const Mat<S>& a) {
  MatD r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = value_of(a(i, j));
  return r;
}

inline MatD derivs(const Mat<Dual>& a) {
  MatD r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = a(i, j).deriv;
  return r;
}

inline Mat<Dual> make_dual(const MatD& value, const MatD& deriv) {
  Mat<Dual> r(value.rows(), value.cols());
  for (Eigen::Index i = 0; i < value.rows(); ++i)
    for (Eigen::Index j = 0; j < value.cols(); ++j) r(i, j) = Dual(value(i, j), deriv(i, j));
  return r;
}

inline Vec<Dual> make_dual(const VecD& value, const VecD& deriv) {
  Vec<Dual> r(value.size());
  for (Eigen::Index i = 0; i < value.size(); ++i) r(i) = Dual(value(i), deriv(i));
  return r;
}

}  // namespace piola
