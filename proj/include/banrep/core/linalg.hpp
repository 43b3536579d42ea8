#pragma once

#include "banrep/core/types.hpp"

namespace banrep::linalg {

/// A x through the active SIMD backend.
Vector apply(const Matrix& a, const Vector& x);

/// A^T x through the active SIMD backend.
Vector apply_transpose(const Matrix& a, const Vector& x);

/// Singular values below `rel_tol` times the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

Index numerical_rank(const Matrix& a, double rel_tol = kRankTolerance);

/// Unit vector spanning part of the null space of `a`, or an empty vector if
/// `a` has full column rank at `rel_tol`.
Vector null_vector(const Matrix& a, double rel_tol = kRankTolerance);

double lp_norm(const Vector& x, double p);

}  // namespace banrep::linalg
