#include "hsflow/matexp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>

namespace hsflow {

Matrix commutator(const Matrix& a, const Matrix& b) {
  ensure_square(a, "commutator");
  ensure_square(b, "commutator");
  ensure_same_shape(a, b, "commutator");
  return a * b - b * a;
}

Matrix expm(const Matrix& xi) {
  ensure_square(xi, "expm");
  ensure_finite(xi, "expm");
  const Eigen::Index n = xi.rows();
  const Matrix id = Matrix::Identity(n, n);
  if (n == 0) return xi;

  // Degree-13 diagonal Pade coefficients.
  static const double b[14] = {64764752532480000.0,
                               32382376266240000.0,
                               7771770303897600.0,
                               1187353796428800.0,
                               129060195264000.0,
                               10559470521600.0,
                               670442572800.0,
                               33522128640.0,
                               1323241920.0,
                               40840800.0,
                               960960.0,
                               16380.0,
                               182.0,
                               1.0};
  const double theta13 = 5.371920351148152;

  const double norm1 = xi.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  if (squarings > 100) {
    throw std::invalid_argument("expm: norm " + std::to_string(norm1) +
                                " too large, would overflow");
  }

  const Matrix a = xi / std::ldexp(1.0, squarings);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;

  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
           b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix cayley(const Matrix& xi) {
  ensure_square(xi, "cayley");
  ensure_finite(xi, "cayley");
  const Eigen::Index n = xi.rows();
  const Matrix id = Matrix::Identity(n, n);
  Eigen::FullPivLU<Matrix> lu(id - 0.5 * xi);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("cayley: I - xi/2 is singular");
  }
  return lu.solve(id + 0.5 * xi);
}

Matrix hat(const Eigen::Vector3d& v) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = -v(2);
  m(0, 2) = v(1);
  m(1, 0) = v(2);
  m(1, 2) = -v(0);
  m(2, 0) = -v(1);
  m(2, 1) = v(0);
  return m;
}

Eigen::Vector3d vee(const Matrix& m) {
  if (m.rows() != 3 || m.cols() != 3) {
    throw std::invalid_argument("vee: expected a 3x3 matrix");
  }
  if ((m + m.transpose()).norm() > 1e-12) {
    throw std::invalid_argument("vee: input is not skew-symmetric");
  }
  return Eigen::Vector3d(m(2, 1), m(0, 2), m(1, 0));
}

Matrix solve_sylvester_spd(const Matrix& p, const Matrix& rhs) {
  ensure_square(p, "solve_sylvester_spd");
  ensure_same_shape(p, rhs, "solve_sylvester_spd");
  if ((p - p.transpose()).norm() > 1e-10 * std::max(1.0, p.norm())) {
    throw std::invalid_argument("solve_sylvester_spd: p is not symmetric");
  }
  if ((rhs - rhs.transpose()).norm() > 1e-10 * std::max(1.0, rhs.norm())) {
    throw std::invalid_argument("solve_sylvester_spd: rhs is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
  const Vector lambda = eig.eigenvalues();
  const double floor = 1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() <= floor) {
    throw std::invalid_argument(
        "solve_sylvester_spd: p is not positive definite (min eigenvalue " +
        std::to_string(lambda.minCoeff()) + ")");
  }
  const Matrix& q = eig.eigenvectors();
  Matrix y = q.transpose() * rhs * q;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      y(i, j) /= lambda(i) + lambda(j);
    }
  }
  Matrix xi = q * y * q.transpose();
  return 0.5 * (xi + xi.transpose());  // kill rounding skewness
}

Matrix random_special_orthogonal(int d, std::uint64_t seed) {
  if (d < 1) {
    throw std::invalid_argument("random_special_orthogonal: d must be >= 1");
  }
  Rng rng(mix_seed(seed, 0x534f5244ULL));
  const Matrix g = rng.gaussian_matrix(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(d - 1) *= -1.0;
  return q;
}

}  // namespace hsflow
