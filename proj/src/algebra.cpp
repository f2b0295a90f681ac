#include "hsflow/algebra.hpp"

namespace hsflow {

std::string AlgebraTag::name() const {
  switch (kind_) {
    case Kind::Skew:
      return "so(" + std::to_string(n_) + ")";
    case Kind::General:
      return "gl(" + std::to_string(n_) + ")";
    case Kind::Affine:
      return (sub_ ? "so(" : "gl(") + std::to_string(n_) + ") |x R^" +
             std::to_string(n_);
    case Kind::PairBlock:
      return (sub_ ? "so(" : "gl(") + std::to_string(n_) + ")^2";
  }
  return "?";
}

Matrix AlgebraTag::project(const Matrix& xi) const {
  ensure_square(xi, "AlgebraTag::project");
  switch (kind_) {
    case Kind::Skew:
      return 0.5 * (xi - xi.transpose());
    case Kind::General:
      return xi;
    case Kind::Affine: {
      Matrix out = Matrix::Zero(n_ + 1, n_ + 1);
      Matrix a = xi.topLeftCorner(n_, n_);
      if (sub_) a = Matrix(0.5 * (a - a.transpose()).eval());
      out.topLeftCorner(n_, n_) = a;
      out.topRightCorner(n_, 1) = xi.topRightCorner(n_, 1);
      return out;
    }
    case Kind::PairBlock: {
      Matrix out = Matrix::Zero(2 * n_, 2 * n_);
      Matrix a = xi.topLeftCorner(n_, n_);
      Matrix b = xi.bottomRightCorner(n_, n_);
      if (sub_) {
        a = Matrix(0.5 * (a - a.transpose()).eval());
        b = Matrix(0.5 * (b - b.transpose()).eval());
      }
      out.topLeftCorner(n_, n_) = a;
      out.bottomRightCorner(n_, n_) = b;
      return out;
    }
  }
  return xi;
}

Matrix AlgebraTag::sample(std::uint64_t seed) const {
  Rng rng(mix_seed(seed, 0x414c4742ULL));
  const int d = ambient_dim();
  Matrix xi = project(rng.gaussian_matrix(d, d));
  const double norm = xi.norm();
  if (norm > 0.0) xi /= norm;
  return xi;
}

}  // namespace hsflow
