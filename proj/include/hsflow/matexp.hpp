#pragma once

#include "hsflow/matrix.hpp"

#include <cstdint>

namespace hsflow {

/// Matrix commutator a*b - b*a.
Matrix commutator(const Matrix& a, const Matrix& b);

/// Matrix exponential by scaling-and-squaring on a degree-13 diagonal Pade
/// kernel. Relative accuracy is at the rounding level for moderate norms,
/// which the order-4 convergence studies rely on.
Matrix expm(const Matrix& xi);

/// Cayley transform (I - xi/2)^{-1} (I + xi/2).
/// Satisfies cayley(-xi) = cayley(xi)^{-1}; maps skew to orthogonal.
Matrix cayley(const Matrix& xi);

/// Hat map R^3 -> so(3) with the cross-product convention hat(v)*w = v x w.
/// (The opposite sign convention also circulates; this library always uses
/// the cross-product one.)
Matrix hat(const Eigen::Vector3d& v);

/// Inverse of the hat map. The input must be 3x3 skew to 1e-12.
Eigen::Vector3d vee(const Matrix& m);

/// Unique symmetric solution xi of p*xi + xi*p = rhs for symmetric positive
/// definite p and symmetric rhs, via eigendecomposition of p and entrywise
/// division by (lambda_i + lambda_j) in the eigenbasis.
Matrix solve_sylvester_spd(const Matrix& p, const Matrix& rhs);

/// Deterministic rotation matrix: orthogonalized seeded Gaussian with the
/// determinant corrected to +1.
Matrix random_special_orthogonal(int d, std::uint64_t seed);

}  // namespace hsflow
