#pragma once

#include "hsflow/algebra.hpp"

#include <functional>
#include <utility>

namespace hsflow {

/// A vector field: point -> tangent matrix.
using VectorField = std::function<Matrix(const Matrix&)>;

/// An isotropy choice nu in C^inf(M, g), already time-step scaled. Every
/// evaluation is checked against the claimed algebra tag.
struct IsotropyChoice {
  AlgebraTag tag;
  std::function<Matrix(const Matrix&)> raw;
  double tol = 1e-12;

  AlgebraElement at(const Matrix& x) const {
    return AlgebraElement::checked(raw(x), tag, tol);
  }
  Matrix value(const Matrix& x) const { return at(x).value; }
};

inline IsotropyChoice constant_choice(const AlgebraElement& xi) {
  Matrix v = xi.value;
  return IsotropyChoice{xi.tag, [v](const Matrix&) { return v; }};
}

inline IsotropyChoice scale_choice(const IsotropyChoice& nu, double h) {
  auto raw = nu.raw;
  return IsotropyChoice{nu.tag,
                        [raw, h](const Matrix& x) { return Matrix(h * raw(x)); },
                        nu.tol};
}

}  // namespace hsflow
