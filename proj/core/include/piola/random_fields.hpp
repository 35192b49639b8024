#pragma once

// Seeded generators for test data: random expressions, maps, vector fields,
// matrices and Gram matrices.

#include <cstdint>
#include <random>
#include <vector>

#include "piola/chart.hpp"
#include "piola/dense.hpp"
#include "piola/expr.hpp"

namespace piola {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL); }

double uniform(Rng& rng, double lo, double hi);

/// (x_i − center_i) / half_width_i as an expression; ranges over [−1, 1] on the box.
Expr normalized_coordinate(const Box& box, int i);

/// Polynomial of total degree ≤ `degree` in the box's normalized
/// coordinates, coefficients uniform in [−amplitude, amplitude].
Expr random_polynomial(const Box& box, int degree, double amplitude, Rng& rng);

/// Sum of `terms` products amplitude·sin/cos(k·x_i + φ)·x_j-style modes.
Expr random_trig(const Box& box, int terms, double amplitude, Rng& rng);

/// Components of a random field on `box`; each component is a degree-2
/// polynomial in normalized coordinates bounded by 1 in magnitude.
std::vector<Expr> random_vector_field(const Box& box, Rng& rng);

/// x + trigonometric polynomial perturbation, a near-identity map of the box.
std::vector<Expr> random_trig_map(const Box& box, double amplitude, Rng& rng);

MatD random_matrix(int d, Rng& rng, double lo = -1.0, double hi = 1.0);
MatD random_orthogonal(int d, Rng& rng);
/// Symmetric positive definite with eigenvalues in [1, condition].
MatD random_spd(int d, Rng& rng, double condition = 100.0);
VecD random_vector(int d, Rng& rng, double lo = -1.0, double hi = 1.0);

}  // namespace piola
