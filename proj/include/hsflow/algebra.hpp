#pragma once

#include "hsflow/matrix.hpp"

#include <string>

namespace hsflow {

/// Identifies the matrix Lie algebra an element is claimed to live in.
/// Membership is a linear constraint; `residual` measures its violation in
/// Frobenius norm and `project` is the orthogonal projection onto the
/// constraint subspace (also used for sampling).
class AlgebraTag {
 public:
  enum class Kind {
    Skew,      // so(n)
    General,   // gl(n)
    Affine,    // (n+1)x(n+1), last row zero, linear block in so(n) or gl(n)
    PairBlock  // blockdiag(xi, zeta) in g x g, each block skew or general
  };

  AlgebraTag() : AlgebraTag(Kind::General, 1, false) {}

  static AlgebraTag skew(int n) { return AlgebraTag(Kind::Skew, n, false); }
  static AlgebraTag general(int n) {
    return AlgebraTag(Kind::General, n, false);
  }
  static AlgebraTag affine(int n, bool orthogonal_block) {
    return AlgebraTag(Kind::Affine, n, orthogonal_block);
  }
  static AlgebraTag pair(int n, bool skew_blocks) {
    return AlgebraTag(Kind::PairBlock, n, skew_blocks);
  }

  Kind kind() const { return kind_; }

  /// Size of the ambient square matrices carrying elements of this algebra.
  int ambient_dim() const {
    switch (kind_) {
      case Kind::Affine:
        return n_ + 1;
      case Kind::PairBlock:
        return 2 * n_;
      default:
        return n_;
    }
  }

  std::string name() const;

  /// Orthogonal projection onto the algebra, as a subspace of gl(ambient).
  Matrix project(const Matrix& xi) const;

  /// Frobenius distance from `xi` to the algebra.
  double residual(const Matrix& xi) const {
    ensure_square(xi, "AlgebraTag::residual");
    if (xi.rows() != ambient_dim()) {
      throw std::invalid_argument("AlgebraTag::residual: expected size " +
                                  std::to_string(ambient_dim()) + ", got " +
                                  std::to_string(xi.rows()));
    }
    return (xi - project(xi)).norm();
  }

  /// Deterministic unit-Frobenius-norm element.
  Matrix sample(std::uint64_t seed) const;

 private:
  AlgebraTag(Kind kind, int n, bool sub) : kind_(kind), n_(n), sub_(sub) {
    if (n < 1) throw std::invalid_argument("AlgebraTag: dimension must be >=1");
  }

  Kind kind_;
  int n_;     // structural dimension (block size for Affine/PairBlock)
  bool sub_;  // Affine: orthogonal linear block; PairBlock: skew blocks
};

/// A matrix together with the algebra it claims to live in; the claim is
/// checked on construction.
struct AlgebraElement {
  Matrix value;
  AlgebraTag tag;

  static AlgebraElement checked(Matrix value, const AlgebraTag& tag,
                                double tol = 1e-12) {
    ensure_finite(value, "AlgebraElement");
    const double r = tag.residual(value);
    if (r > tol) {
      throw std::invalid_argument("AlgebraElement: value violates " +
                                  tag.name() + " constraint by " +
                                  std::to_string(r));
    }
    return AlgebraElement{std::move(value), tag};
  }
};

}  // namespace hsflow
