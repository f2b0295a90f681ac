#include "hsflow/spaces.hpp"

#include "hsflow/matexp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hsflow {

namespace {

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix normalized(Matrix m) {
  const double n = m.norm();
  if (n > 0.0) m /= n;
  return m;
}

double orthogonality_drift(const Matrix& g) {
  return (g.transpose() * g -
          Matrix::Identity(g.cols(), g.cols()))
      .norm();
}

double invertibility_drift(const Matrix& g) {
  Eigen::FullPivLU<Matrix> lu(g);
  return lu.isInvertible() ? 0.0 : 1.0;
}

Vector sorted_eigenvalues(const Matrix& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym(p));
  return eig.eigenvalues();  // ascending
}

/// A matrix group acting on itself by left multiplication.
HomogeneousSpace matrix_group_space(
    std::string name, AlgebraTag tag,
    std::function<double(const Matrix&)> grp_membership,
    std::function<Matrix(std::uint64_t)> sample, std::string invariant_name) {
  HomogeneousSpace s{
      .name = std::move(name),
      .algebra_tag = tag,
      .origin = Matrix::Identity(tag.ambient_dim(), tag.ambient_dim()),
      .act = [](const Matrix& g, const Matrix& x) { return Matrix(g * x); },
      .act_tangent = [](const Matrix& g,
                        const Matrix& v) { return Matrix(g * v); },
      .inf_act = [](const Matrix& xi,
                    const Matrix& x) { return Matrix(xi * x); },
      .membership = grp_membership,
      .sample_group = sample,
      .sample_tangent =
          [tag](const Matrix& x, std::uint64_t seed) {
            return normalized(tag.sample(seed) * x);
          },
      .lift_point = [](const Matrix& x) { return x; },
      .h_project =
          [tag](const Matrix& xi) {
            ensure_square(xi, "h_project");
            return Matrix(Matrix::Zero(xi.rows(), xi.cols()));
          },
  };
  s.invariant_name = std::move(invariant_name);
  auto copy = s;
  s.group_space = [copy]() { return copy; };
  return s;
}

std::function<Matrix(std::uint64_t)> gl_sampler(int d, double spread) {
  const AlgebraTag tag = AlgebraTag::general(d);
  return [tag, spread](std::uint64_t seed) {
    return expm(spread * tag.sample(seed));
  };
}

}  // namespace

// ---- affine ----

std::pair<HomogeneousSpace, Connection> affine_space(
    const std::string& isotropy_tag, int d) {
  if (d < 1) throw std::invalid_argument("affine_space: d must be >= 1");
  const bool orth = isotropy_tag == "orthogonal";
  if (!orth && isotropy_tag != "full_gl") {
    throw std::invalid_argument(
        "affine_space: isotropy_tag must be 'orthogonal' or 'full_gl'");
  }
  HomogeneousSpace s;
  s.name = "affine:" + std::to_string(d) + (orth ? "" : ":gl");
  s.algebra_tag = AlgebraTag::affine(d, orth);
  s.origin = Matrix::Zero(d, 1);
  s.act = [d](const Matrix& g, const Matrix& x) {
    return Matrix(g.topLeftCorner(d, d) * x + g.topRightCorner(d, 1));
  };
  s.act_tangent = [d](const Matrix& g, const Matrix& v) {
    return Matrix(g.topLeftCorner(d, d) * v);
  };
  s.inf_act = [d](const Matrix& xi, const Matrix& x) {
    return Matrix(xi.topLeftCorner(d, d) * x + xi.topRightCorner(d, 1));
  };
  s.membership = [](const Matrix&) { return 0.0; };
  auto lin_sample = orth ? std::function<Matrix(std::uint64_t)>(
                               [d](std::uint64_t seed) {
                                 return random_special_orthogonal(d, seed);
                               })
                         : gl_sampler(d, 0.6);
  s.sample_group = [d, lin_sample](std::uint64_t seed) {
    Matrix g = Matrix::Identity(d + 1, d + 1);
    g.topLeftCorner(d, d) = lin_sample(mix_seed(seed, 1));
    Rng rng(mix_seed(seed, 2));
    g.topRightCorner(d, 1) = rng.gaussian_matrix(d, 1);
    return g;
  };
  s.sample_tangent = [d](const Matrix&, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 3));
    return normalized(rng.gaussian_matrix(d, 1));
  };
  s.lift_point = [d](const Matrix& x) {
    Matrix g = Matrix::Identity(d + 1, d + 1);
    g.topRightCorner(d, 1) = x;
    return g;
  };
  s.h_project = [d, orth](const Matrix& xi) {
    Matrix out = Matrix::Zero(d + 1, d + 1);
    Matrix a = xi.topLeftCorner(d, d);
    if (orth) a = Matrix(0.5 * (a - a.transpose()).eval());
    out.topLeftCorner(d, d) = a;
    return out;
  };
  const AlgebraTag tag = s.algebra_tag;
  auto grp_membership = [d, orth](const Matrix& g) {
    double drift = (g.row(d) - Eigen::RowVectorXd::Unit(d + 1, d)).norm();
    const Matrix lin = g.topLeftCorner(d, d);
    drift += orth ? orthogonality_drift(lin) : invertibility_drift(lin);
    return drift;
  };
  s.group_space = [s, grp_membership]() {
    return matrix_group_space("group(" + s.name + ")", s.algebra_tag,
                              grp_membership, s.sample_group, "group_drift");
  };
  s.invariant_name = "zero";

  Connection conn;
  conn.space = s;
  conn.eval = [d](const Matrix& x, const Matrix& v) {
    (void)x;
    Matrix xi = Matrix::Zero(d + 1, d + 1);
    xi.topRightCorner(d, 1) = v;
    return xi;
  };
  return {s, conn};
}

// ---- Stiefel and sphere ----

namespace {

std::pair<HomogeneousSpace, Connection> stiefel_impl(int n, int k,
                                                     bool sphere_name) {
  if (k < 1 || k >= n) {
    throw std::invalid_argument(
        "stiefel: need 1 <= k < n (the SO(n) action on k = n is not "
        "supported)");
  }
  HomogeneousSpace s;
  s.name = sphere_name ? "sphere:" + std::to_string(n)
                       : "stiefel:" + std::to_string(n) + "," +
                             std::to_string(k);
  s.algebra_tag = AlgebraTag::skew(n);
  Matrix origin = Matrix::Zero(n, k);
  origin.bottomRows(k) = Matrix::Identity(k, k);
  s.origin = origin;
  s.act = [](const Matrix& g, const Matrix& x) { return Matrix(g * x); };
  s.act_tangent = [](const Matrix& g, const Matrix& v) {
    return Matrix(g * v);
  };
  s.inf_act = [](const Matrix& xi, const Matrix& x) {
    return Matrix(xi * x);
  };
  s.membership = [k](const Matrix& q) {
    return (q.transpose() * q - Matrix::Identity(k, k)).norm();
  };
  s.sample_group = [n](std::uint64_t seed) {
    return random_special_orthogonal(n, seed);
  };
  s.sample_tangent = [n, k](const Matrix& q, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 4));
    const Matrix g = rng.gaussian_matrix(n, k);
    return normalized(g - q * sym(q.transpose() * g));
  };
  s.lift_point = [n, k](const Matrix& q) {
    // Complete q to a rotation whose last k columns are q.
    Eigen::HouseholderQR<Matrix> qr(q);
    const Matrix full = qr.householderQ();
    Matrix r(n, n);
    r.leftCols(n - k) = full.rightCols(n - k);
    r.rightCols(k) = q;
    if (r.determinant() < 0.0) r.col(0) *= -1.0;
    return r;
  };
  s.h_project = [n, k](const Matrix& xi) {
    Matrix out = Matrix::Zero(n, n);
    Matrix w = xi.topLeftCorner(n - k, n - k);
    out.topLeftCorner(n - k, n - k) = 0.5 * (w - w.transpose());
    return out;
  };
  s.group_space = [n]() {
    return matrix_group_space(
        "so:" + std::to_string(n), AlgebraTag::skew(n), orthogonality_drift,
        [n](std::uint64_t seed) { return random_special_orthogonal(n, seed); },
        "orth_drift");
  };
  s.invariant_name = "orth_drift";

  Connection conn;
  conn.space = s;
  const bool simplified = (k == 1);
  conn.eval = [simplified, k, membership = s.membership](const Matrix& q,
                                                         const Matrix& dq) {
    if (membership(q) > 1e-8) {
      throw std::invalid_argument(
          "stiefel connection: point violates Q^T Q = I");
    }
    ensure_same_shape(q, dq, "stiefel connection");
    Matrix omega = dq * q.transpose() - q * dq.transpose();
    if (!simplified) {
      // equivalently -Q (Q^T dQ) Q^T for tangent dQ; makes omega * Q = dQ
      // an identity
      omega += q * dq.transpose() * q * q.transpose();
    }
    (void)k;
    return omega;
  };
  return {s, conn};
}

}  // namespace

std::pair<HomogeneousSpace, Connection> stiefel(int n, int k) {
  return stiefel_impl(n, k, false);
}

std::pair<HomogeneousSpace, Connection> sphere(int d) {
  return stiefel_impl(d, 1, true);
}

// ---- isospectral, Grassmannian, Lax ----

HomogeneousSpace isospectral(
    const std::vector<std::pair<double, int>>& eigs) {
  if (eigs.empty()) {
    throw std::invalid_argument("isospectral: empty spectrum");
  }
  int d = 0;
  std::vector<double> distinct;
  for (const auto& [value, mult] : eigs) {
    if (mult < 1) {
      throw std::invalid_argument("isospectral: multiplicities must be >= 1");
    }
    d += mult;
    if (std::none_of(distinct.begin(), distinct.end(), [&](double v) {
          return std::abs(v - value) <= 1e-12;
        })) {
      distinct.push_back(value);
    }
  }
  if (distinct.size() < 2) {
    throw std::invalid_argument(
        "isospectral: fewer than two distinct eigenvalues, the manifold "
        "reduces to one point");
  }

  Matrix origin = Matrix::Zero(d, d);
  Vector prescribed(d);
  {
    int at = 0;
    for (const auto& [value, mult] : eigs) {
      for (int i = 0; i < mult; ++i) origin(at + i, at + i) = value;
      at += mult;
    }
  }
  {
    Vector v = origin.diagonal();
    std::sort(v.data(), v.data() + d);
    prescribed = v;
  }

  HomogeneousSpace s;
  {
    std::ostringstream name;
    name << "isospectral:";
    for (int i = 0; i < d; ++i) name << (i ? "," : "") << origin(i, i);
    s.name = name.str();
  }
  s.algebra_tag = AlgebraTag::skew(d);
  s.origin = origin;
  s.act = [](const Matrix& g, const Matrix& x) {
    return Matrix(g * x * g.transpose());
  };
  s.act_tangent = [](const Matrix& g, const Matrix& v) {
    return Matrix(g * v * g.transpose());
  };
  s.inf_act = [](const Matrix& xi, const Matrix& x) {
    return Matrix(xi * x - x * xi);
  };
  auto spectrum_drift = [prescribed](const Matrix& p) {
    return (sorted_eigenvalues(p) - prescribed).norm();
  };
  s.membership = [spectrum_drift](const Matrix& p) {
    return (p - p.transpose()).norm() + spectrum_drift(p);
  };
  s.sample_group = [d](std::uint64_t seed) {
    return random_special_orthogonal(d, seed);
  };
  s.sample_tangent = [d](const Matrix& p, std::uint64_t seed) {
    const Matrix xi = AlgebraTag::skew(d).sample(mix_seed(seed, 5));
    return normalized(xi * p - p * xi);
  };
  // Multiplicity block layout of the origin, for the point lift and the
  // isotropy projection.
  std::vector<int> block_start, block_size;
  {
    int at = 0;
    for (const auto& [value, mult] : eigs) {
      (void)value;
      block_start.push_back(at);
      block_size.push_back(mult);
      at += mult;
    }
  }
  s.lift_point = [origin, d](const Matrix& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym(p));
    const Vector lam = eig.eigenvalues();
    const Matrix v = eig.eigenvectors();
    // Match ascending eigenvalues to the origin's diagonal slots.
    std::vector<int> slot_order(d);
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return origin(a, a) < origin(b, b);
    });
    for (int i = 0; i < d; ++i) slot_order[i] = idx[i];
    Matrix r = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      if (std::abs(lam(i) - origin(slot_order[i], slot_order[i])) > 1e-6) {
        throw std::invalid_argument(
            "isospectral lift: point spectrum does not match the manifold");
      }
      r.col(slot_order[i]) = v.col(i);
    }
    if (r.determinant() < 0.0) r.col(slot_order[0]) *= -1.0;
    return r;
  };
  s.h_project = [block_start, block_size, d](const Matrix& xi) {
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t b = 0; b < block_start.size(); ++b) {
      const int a = block_start[b], m = block_size[b];
      Matrix blk = xi.block(a, a, m, m);
      out.block(a, a, m, m) = 0.5 * (blk - blk.transpose());
    }
    return out;
  };
  s.group_space = [d]() {
    return matrix_group_space(
        "so:" + std::to_string(d), AlgebraTag::skew(d), orthogonality_drift,
        [d](std::uint64_t seed) { return random_special_orthogonal(d, seed); },
        "orth_drift");
  };
  s.invariant_name = "spectrum_drift";
  s.invariant = spectrum_drift;
  return s;
}

Connection grassmann_connection(const HomogeneousSpace& space) {
  const Matrix& origin = space.origin;
  ensure_square(origin, "grassmann_connection");
  if ((origin - Matrix(origin.diagonal().asDiagonal())).norm() > 0.0) {
    throw std::invalid_argument(
        "grassmann_connection: expected an isospectral space (diagonal "
        "origin)");
  }
  std::vector<double> distinct;
  for (Eigen::Index i = 0; i < origin.rows(); ++i) {
    const double v = origin(i, i);
    if (std::none_of(distinct.begin(), distinct.end(), [&](double w) {
          return std::abs(w - v) <= 1e-12;
        })) {
      distinct.push_back(v);
    }
  }
  if (distinct.size() != 2) {
    throw std::invalid_argument(
        "grassmann_connection: closed form needs exactly two distinct "
        "eigenvalues; for all-simple spectra use a Lax choice, otherwise no "
        "closed-form connection is known");
  }
  const double gap = distinct[0] - distinct[1];
  const double scale = 1.0 / (gap * gap);
  Connection conn;
  conn.space = space;
  conn.eval = [scale, membership = space.membership](const Matrix& p,
                                                     const Matrix& dp) {
    if (membership(p) > 1e-8) {
      throw std::invalid_argument(
          "grassmann connection: point is off the isospectral manifold");
    }
    return Matrix(scale * (dp * p - p * dp));
  };
  return conn;
}

std::pair<HomogeneousSpace, Connection> grassmann(int n, int k) {
  if (k < 1 || k >= n) {
    throw std::invalid_argument("grassmann: need 1 <= k < n");
  }
  HomogeneousSpace s = isospectral({{1.0, k}, {0.0, n - k}});
  s.name = "grassmann:" + std::to_string(n) + "," + std::to_string(k);
  Connection conn = grassmann_connection(s);
  conn.space = s;
  return {s, conn};
}

IsotropyChoice lax_choice(std::function<Matrix(const Matrix&)> xi_of_p,
                          int d, double h) {
  return IsotropyChoice{
      AlgebraTag::skew(d),
      [xi_of_p = std::move(xi_of_p), h](const Matrix& p) {
        return Matrix(h * xi_of_p(p));
      }};
}

// ---- SPD / polar ----

std::pair<HomogeneousSpace, Connection> spd_space(int d) {
  if (d < 1) throw std::invalid_argument("spd_space: d must be >= 1");
  HomogeneousSpace s;
  s.name = "spd:" + std::to_string(d);
  s.algebra_tag = AlgebraTag::general(d);
  s.origin = Matrix::Identity(d, d);
  s.act = [](const Matrix& g, const Matrix& x) {
    return Matrix(g * x * g.transpose());
  };
  s.act_tangent = [](const Matrix& g, const Matrix& v) {
    return Matrix(g * v * g.transpose());
  };
  s.inf_act = [](const Matrix& xi, const Matrix& x) {
    return Matrix(xi * x + x * xi.transpose());
  };
  auto min_eig = [](const Matrix& p) {
    return sorted_eigenvalues(p).minCoeff();
  };
  s.membership = [min_eig](const Matrix& p) {
    double drift = (p - p.transpose()).norm();
    const double lo = min_eig(p);
    if (lo <= 1e-12) drift += 1.0 + std::abs(lo);
    return drift;
  };
  s.sample_group = gl_sampler(d, 0.5);
  s.sample_tangent = [d](const Matrix&, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 6));
    return normalized(sym(rng.gaussian_matrix(d, d)));
  };
  s.lift_point = [](const Matrix& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym(p));
    return Matrix(eig.operatorSqrt());
  };
  s.h_project = [](const Matrix& xi) {
    return Matrix(0.5 * (xi - xi.transpose()));
  };
  s.group_space = [d, sample = s.sample_group]() {
    return matrix_group_space("gl:" + std::to_string(d),
                              AlgebraTag::general(d), invertibility_drift,
                              sample, "invertible");
  };
  s.invariant_name = "min_eig";
  s.invariant = min_eig;

  Connection conn;
  conn.space = s;
  // Equivariant extension of the reductive complement m = Sym(d) at the
  // origin. At P = A A^T the complement is the conjugated A Sym A^{-1},
  // characterized by xi P = P xi^T; with consistency xi P + P xi^T = dP
  // this pins xi = dP P^{-1} / 2. The plain symmetric Sylvester solution
  // agrees at the origin but is not equivariant away from it.
  conn.eval = [min_eig](const Matrix& p, const Matrix& dp) {
    if ((dp - dp.transpose()).norm() > 1e-10 * std::max(1.0, dp.norm())) {
      throw std::invalid_argument("spd connection: tangent is not symmetric");
    }
    if ((p - p.transpose()).norm() > 1e-10 * std::max(1.0, p.norm()) ||
        min_eig(p) <= 1e-12) {
      throw std::invalid_argument("spd connection: point is not SPD");
    }
    return Matrix(0.5 * p.llt().solve(dp).transpose());
  };
  return {s, conn};
}

// ---- Lie group with left/right action ----

std::pair<HomogeneousSpace, Connection> lie_group_space(
    const std::string& group_tag, int d, const std::string& side) {
  if (group_tag != "so" && group_tag != "gl") {
    throw std::invalid_argument("lie_group_space: group_tag must be so|gl");
  }
  if (side != "left" && side != "right") {
    throw std::invalid_argument("lie_group_space: side must be left|right");
  }
  const bool orth = group_tag == "so";
  const AlgebraTag tag =
      orth ? AlgebraTag::skew(d) : AlgebraTag::general(d);
  auto grp_membership = orth ? std::function<double(const Matrix&)>(
                                   orthogonality_drift)
                             : invertibility_drift;
  auto sampler = orth ? std::function<Matrix(std::uint64_t)>(
                            [d](std::uint64_t seed) {
                              return random_special_orthogonal(d, seed);
                            })
                      : gl_sampler(d, 0.5);
  const std::string base = group_tag + ":" + std::to_string(d);

  if (side == "left") {
    HomogeneousSpace s = matrix_group_space(
        base, tag, grp_membership, sampler,
        orth ? "orth_drift" : "invertible");
    Connection conn;
    conn.space = s;
    conn.eval = [grp_membership](const Matrix& g, const Matrix& dg) {
      if (grp_membership(g) > 1e-6) {
        throw std::invalid_argument("maurer-cartan: point left the group");
      }
      return Matrix(dg * g.inverse());
    };
    return {s, conn};
  }

  HomogeneousSpace s;
  s.name = base + ":right";
  s.algebra_tag = tag;
  s.origin = Matrix::Identity(d, d);
  s.act = [](const Matrix& g, const Matrix& x) {
    return Matrix(x * g.inverse());
  };
  s.act_tangent = [](const Matrix& g, const Matrix& v) {
    return Matrix(v * g.inverse());
  };
  s.inf_act = [](const Matrix& xi, const Matrix& x) {
    return Matrix(-x * xi);
  };
  s.membership = grp_membership;
  s.sample_group = sampler;
  s.sample_tangent = [tag](const Matrix& x, std::uint64_t seed) {
    return normalized(x * tag.sample(seed));
  };
  s.lift_point = [](const Matrix& x) { return Matrix(x.inverse()); };
  s.h_project = [d](const Matrix&) { return Matrix(Matrix::Zero(d, d)); };
  s.invariant_name = orth ? "orth_drift" : "invertible";

  Connection conn;
  conn.space = s;
  conn.eval = [grp_membership](const Matrix& g, const Matrix& dg) {
    if (grp_membership(g) > 1e-6) {
      throw std::invalid_argument("maurer-cartan: point left the group");
    }
    return Matrix(-(g.inverse() * dg));
  };
  return {s, conn};
}

// ---- Cartan-Schouten ----

std::pair<HomogeneousSpace, Connection> cartan_schouten(
    const std::string& group_tag, int d, const std::string& variant) {
  if (group_tag != "so" && group_tag != "gl") {
    throw std::invalid_argument("cartan_schouten: group_tag must be so|gl");
  }
  if (variant != "plus" && variant != "minus" && variant != "mean") {
    throw std::invalid_argument(
        "cartan_schouten: variant must be plus|minus|mean");
  }
  const bool orth = group_tag == "so";
  auto grp_membership =
      orth ? std::function<double(const Matrix&)>(orthogonality_drift)
           : invertibility_drift;
  auto base_sampler = orth ? std::function<Matrix(std::uint64_t)>(
                                 [d](std::uint64_t seed) {
                                   return random_special_orthogonal(d, seed);
                                 })
                           : gl_sampler(d, 0.5);

  HomogeneousSpace s;
  s.name = "cartan_schouten:" + group_tag + std::to_string(d) + ":" + variant;
  s.algebra_tag = AlgebraTag::pair(d, orth);
  s.origin = Matrix::Identity(d, d);
  s.act = [d](const Matrix& g, const Matrix& x) {
    return Matrix(g.topLeftCorner(d, d) * x *
                  g.bottomRightCorner(d, d).inverse());
  };
  s.act_tangent = [d](const Matrix& g, const Matrix& v) {
    return Matrix(g.topLeftCorner(d, d) * v *
                  g.bottomRightCorner(d, d).inverse());
  };
  s.inf_act = [d](const Matrix& xi, const Matrix& x) {
    return Matrix(xi.topLeftCorner(d, d) * x -
                  x * xi.bottomRightCorner(d, d));
  };
  s.membership = grp_membership;
  s.sample_group = [d, base_sampler](std::uint64_t seed) {
    Matrix g = Matrix::Zero(2 * d, 2 * d);
    g.topLeftCorner(d, d) = base_sampler(mix_seed(seed, 7));
    g.bottomRightCorner(d, d) = base_sampler(mix_seed(seed, 8));
    return g;
  };
  s.sample_tangent = [d, orth](const Matrix& x, std::uint64_t seed) {
    const AlgebraTag t = orth ? AlgebraTag::skew(d) : AlgebraTag::general(d);
    return normalized(t.sample(seed) * x);
  };
  s.lift_point = [d](const Matrix& x) {
    Matrix g = Matrix::Identity(2 * d, 2 * d);
    g.topLeftCorner(d, d) = x;
    return g;
  };
  s.h_project = [d](const Matrix& xi) {
    const Matrix m =
        0.5 * (xi.topLeftCorner(d, d) + xi.bottomRightCorner(d, d));
    Matrix out = Matrix::Zero(2 * d, 2 * d);
    out.topLeftCorner(d, d) = m;
    out.bottomRightCorner(d, d) = m;
    return out;
  };
  auto pair_membership = [d, grp_membership](const Matrix& g) {
    double drift = grp_membership(g.topLeftCorner(d, d)) +
                   grp_membership(g.bottomRightCorner(d, d));
    drift += g.topRightCorner(d, d).norm() + g.bottomLeftCorner(d, d).norm();
    return drift;
  };
  s.group_space = [tag = s.algebra_tag, pair_membership,
                   sample = s.sample_group, name = s.name]() {
    return matrix_group_space("group(" + name + ")", tag, pair_membership,
                              sample, "group_drift");
  };
  s.invariant_name = orth ? "orth_drift" : "invertible";

  const double wplus = variant == "plus" ? 1.0 : (variant == "mean" ? 0.5 : 0.0);
  const double wminus =
      variant == "minus" ? 1.0 : (variant == "mean" ? 0.5 : 0.0);
  Connection conn;
  conn.space = s;
  conn.eval = [d, wplus, wminus, grp_membership](const Matrix& g,
                                                 const Matrix& dg) {
    if (grp_membership(g) > 1e-6) {
      throw std::invalid_argument(
          "cartan-schouten connection: point left the group");
    }
    const Matrix ginv = g.inverse();
    Matrix out = Matrix::Zero(2 * d, 2 * d);
    out.topLeftCorner(d, d) = wplus * (dg * ginv);
    out.bottomRightCorner(d, d) = -wminus * (ginv * dg);
    return out;
  };
  return {s, conn};
}

// ---- lifting and choices ----

VectorField lift(const Connection& conn, VectorField f) {
  const HomogeneousSpace space = conn.space;
  auto eval = conn.eval;
  return [space, eval, f = std::move(f)](const Matrix& g) {
    const Matrix x = space.act(g, space.origin);
    return Matrix(eval(x, f(x)) * g);
  };
}

IsotropyChoice connection_choice(const Connection& conn, VectorField f,
                                 double h) {
  auto eval = conn.eval;
  return IsotropyChoice{conn.space.algebra_tag,
                        [eval, f = std::move(f), h](const Matrix& x) {
                          return Matrix(h * eval(x, f(x)));
                        }};
}

// ---- registry ----

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) out.push_back(token);
  return out;
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": bad integer '" + text + "'");
  }
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": bad real '" + text + "'");
  }
}

}  // namespace

SpaceEntry make_space(const std::string& name) {
  const auto parts = split(name, ':');
  if (parts.empty()) throw std::invalid_argument("make_space: empty name");
  const std::string& family = parts[0];
  auto args = [&](std::size_t i) -> std::string {
    return i < parts.size() ? parts[i] : "";
  };

  if (family == "sphere") {
    auto [s, c] = sphere(parse_int(args(1), name));
    return SpaceEntry{s, c};
  }
  if (family == "stiefel" || family == "grassmann") {
    const auto nk = split(args(1), ',');
    if (nk.size() != 2) {
      throw std::invalid_argument(name + ": expected n,k");
    }
    const int n = parse_int(nk[0], name), k = parse_int(nk[1], name);
    auto [s, c] = family == "stiefel" ? stiefel(n, k) : grassmann(n, k);
    return SpaceEntry{s, c};
  }
  if (family == "projective") {
    auto [s, c] = grassmann(parse_int(args(1), name), 1);
    return SpaceEntry{s, c};
  }
  if (family == "isospectral") {
    std::vector<std::pair<double, int>> eigs;
    for (const auto& tok : split(args(1), ',')) {
      const double v = parse_real(tok, name);
      if (!eigs.empty() && std::abs(eigs.back().first - v) <= 1e-12) {
        ++eigs.back().second;
      } else {
        eigs.emplace_back(v, 1);
      }
    }
    HomogeneousSpace s = isospectral(eigs);
    std::vector<double> distinct;
    for (const auto& [v, m] : eigs) {
      (void)m;
      if (std::none_of(distinct.begin(), distinct.end(), [&](double w) {
            return std::abs(w - v) <= 1e-12;
          })) {
        distinct.push_back(v);
      }
    }
    if (distinct.size() == 2) {
      return SpaceEntry{s, grassmann_connection(s)};
    }
    return SpaceEntry{s, std::nullopt};
  }
  if (family == "spd") {
    auto [s, c] = spd_space(parse_int(args(1), name));
    return SpaceEntry{s, c};
  }
  if (family == "so" || family == "gl") {
    const std::string side = args(2).empty() ? "left" : args(2);
    auto [s, c] = lie_group_space(family, parse_int(args(1), name), side);
    return SpaceEntry{s, c};
  }
  if (family == "cartan_schouten") {
    const std::string grp = args(1);
    if (grp.size() < 3) {
      throw std::invalid_argument(name + ": expected so<d> or gl<d>");
    }
    const std::string tag = grp.substr(0, 2);
    const int d = parse_int(grp.substr(2), name);
    const std::string variant = args(2).empty() ? "mean" : args(2);
    auto [s, c] = cartan_schouten(tag, d, variant);
    return SpaceEntry{s, c};
  }
  if (family == "affine") {
    const int d = parse_int(args(1), name);
    const std::string tag = args(2) == "gl" ? "full_gl" : "orthogonal";
    auto [s, c] = affine_space(tag, d);
    return SpaceEntry{s, c};
  }
  std::ostringstream msg;
  msg << "make_space: unknown space '" << name << "'; families:";
  for (const auto& f : space_catalog()) msg << "\n  " << f;
  throw std::invalid_argument(msg.str());
}

std::vector<std::string> space_catalog() {
  return {
      "sphere:<d>                      e.g. sphere:3",
      "stiefel:<n>,<k>                 e.g. stiefel:5,2",
      "grassmann:<n>,<k>               e.g. grassmann:4,2",
      "projective:<d>                  e.g. projective:3",
      "isospectral:<l1>,<l2>,...       e.g. isospectral:2,1,-1,-2",
      "spd:<d>                         e.g. spd:3",
      "so:<d>[:left|right]             e.g. so:3",
      "gl:<d>[:left|right]             e.g. gl:3:right",
      "cartan_schouten:<so|gl><d>:<plus|minus|mean>  e.g. "
      "cartan_schouten:so3:mean",
      "affine:<d>[:gl]                 e.g. affine:3",
  };
}

}  // namespace hsflow
