#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace piola {

/// First-order dual number: a value carrying one exact directional derivative.
///
/// Arithmetic on the value component performs exactly the same floating-point
/// operations as plain `double` code, so running a scalar-generic algorithm on
/// `Dual` reproduces the `double` result bit-for-bit in `value`.
struct Dual {
  double value = 0.0;
  double deriv = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double v, double d) : value(v), deriv(d) {}

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    deriv += o.deriv;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    value -= o.value;
    deriv -= o.deriv;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    deriv = deriv * o.value + value * o.deriv;
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const double q = value / o.value;
    deriv = (deriv - q * o.deriv) / o.value;
    value = q;
    return *this;
  }
};

constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }
constexpr Dual operator-(const Dual& a) { return {-a.value, -a.deriv}; }
constexpr Dual operator+(const Dual& a) { return a; }

constexpr bool operator==(const Dual& a, const Dual& b) { return a.value == b.value; }
constexpr bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
constexpr bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
constexpr bool operator<=(const Dual& a, const Dual& b) { return a.value <= b.value; }
constexpr bool operator>=(const Dual& a, const Dual& b) { return a.value >= b.value; }

inline Dual sin(const Dual& a) { return {std::sin(a.value), std::cos(a.value) * a.deriv}; }
inline Dual cos(const Dual& a) { return {std::cos(a.value), -std::sin(a.value) * a.deriv}; }
inline Dual exp(const Dual& a) {
  const double e = std::exp(a.value);
  return {e, e * a.deriv};
}
inline Dual log(const Dual& a) { return {std::log(a.value), a.deriv / a.value}; }
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.value);
  return {s, a.deriv / (2.0 * s)};
}
inline Dual abs(const Dual& a) { return a.value < 0.0 ? -a : a; }

/// Integer power by repeated squaring; negative exponents go through 1/x.
template <class S>
S ipow(const S& base, int n) {
  if (n < 0) return S(1.0) / ipow(base, -n);
  S result(1.0);
  S b = base;
  while (n > 0) {
    if (n & 1) result *= b;
    n >>= 1;
    if (n > 0) b *= b;
  }
  return result;
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value; }
inline double deriv_of(double) { return 0.0; }
inline double deriv_of(const Dual& x) { return x.deriv; }

}  // namespace piola

namespace Eigen {
template <>
struct NumTraits<piola::Dual> : NumTraits<double> {
  using Real = piola::Dual;
  using NonInteger = piola::Dual;
  using Nested = piola::Dual;
  using Literal = piola::Dual;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 4
  };
};
}  // namespace Eigen
