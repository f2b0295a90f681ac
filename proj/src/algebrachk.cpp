#include "hsflow/algebrachk.hpp"

#include "hsflow/matexp.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hsflow {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kClosureTol = 1e-10;
constexpr double kInclusionTol = 1e-9;
constexpr double kSectionTol = 1e-7;

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix basis_columns(const std::vector<Matrix>& basis) {
  if (basis.empty()) return Matrix(0, 0);
  Matrix b(basis.front().size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    ensure_same_shape(basis[j], basis.front(), "basis");
    b.col(static_cast<Eigen::Index>(j)) = vec(basis[j]);
  }
  return b;
}

int numeric_rank(const Matrix& b) {
  if (b.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(b);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = kRankTol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

// Coordinates and residual of y in the column span of b.
struct Coords {
  Vector c;
  double residual;
};

Coords coords_in(const Eigen::ColPivHouseholderQR<Matrix>& qr,
                 const Matrix& b, const Vector& y) {
  if (b.cols() == 0) return {Vector(0), y.norm()};
  Vector c = qr.solve(y);
  return {c, (b * c - y).norm()};
}

}  // namespace

void validate_split(const SubalgebraSplit& split) {
  if (split.g_basis.empty()) {
    throw std::invalid_argument("split: empty g basis");
  }
  for (const auto& m : split.g_basis) {
    ensure_square(m, "split: basis element");
    ensure_finite(m, "split: basis element");
  }
  const Matrix bg = basis_columns(split.g_basis);
  if (numeric_rank(bg) != static_cast<int>(split.g_basis.size())) {
    throw std::invalid_argument("split: g basis is not linearly independent");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr_g(bg);

  auto in_span_g = [&](const std::vector<Matrix>& elems, const char* what) {
    for (const auto& e : elems) {
      ensure_same_shape(e, split.g_basis.front(), "split");
      const double scale = std::max(1.0, e.norm());
      if (coords_in(qr_g, bg, vec(e)).residual > kClosureTol * scale) {
        throw std::invalid_argument(std::string("split: ") + what +
                                    " element outside span(g)");
      }
    }
  };
  in_span_g(split.h_basis, "h");
  in_span_g(split.m_basis, "m");

  // h closed under bracket
  if (!split.h_basis.empty()) {
    const Matrix bh = basis_columns(split.h_basis);
    Eigen::ColPivHouseholderQR<Matrix> qr_h(bh);
    for (const auto& a : split.h_basis) {
      for (const auto& b : split.h_basis) {
        Matrix br = commutator(a, b);
        const double n = br.norm();
        if (n > 0.0) br /= n;
        if (coords_in(qr_h, bh, vec(br)).residual > kClosureTol) {
          throw std::invalid_argument(
              "split: h is not closed under the bracket");
        }
      }
    }
  }

  if (!split.m_basis.empty()) {
    if (split.h_basis.size() + split.m_basis.size() != split.g_basis.size()) {
      throw std::invalid_argument(
          "split: dim h + dim m must equal dim g, got " +
          std::to_string(split.h_basis.size()) + " + " +
          std::to_string(split.m_basis.size()) + " vs " +
          std::to_string(split.g_basis.size()));
    }
    std::vector<Matrix> joint = split.h_basis;
    joint.insert(joint.end(), split.m_basis.begin(), split.m_basis.end());
    if (numeric_rank(basis_columns(joint)) !=
        static_cast<int>(joint.size())) {
      throw std::invalid_argument("split: h + m does not span g");
    }
  }
}

Classification classify(const SubalgebraSplit& split,
                        const std::vector<Matrix>& component_reps) {
  if (split.m_basis.empty()) {
    throw std::invalid_argument("classify: candidate complement m required");
  }
  validate_split(split);

  const auto r = static_cast<Eigen::Index>(split.h_basis.size());
  std::vector<Matrix> joint = split.h_basis;
  joint.insert(joint.end(), split.m_basis.begin(), split.m_basis.end());
  const Matrix bj = basis_columns(joint);
  Eigen::ColPivHouseholderQR<Matrix> qr(bj);
  const Matrix bh = basis_columns(split.h_basis);
  const Matrix bm = basis_columns(split.m_basis);

  // Oblique components of a bracket along h and along m in the joint basis.
  auto parts = [&](Matrix br) -> std::pair<double, double> {
    const double n = br.norm();
    if (n > 0.0) br /= n;
    const Coords c = coords_in(qr, bj, vec(br));
    if (c.residual > 1e-8) {
      throw std::invalid_argument(
          "classify: bracket leaves span(g); g is not closed");
    }
    const double h_part = r > 0 ? (bh * c.c.head(r)).norm() : 0.0;
    const double m_part = (bm * c.c.tail(c.c.size() - r)).norm();
    return {h_part, m_part};
  };

  Classification out;
  double red = 0.0, sym = 0.0, flat = 0.0;
  for (const auto& h : split.h_basis) {
    for (const auto& m : split.m_basis) {
      red = std::max(red, parts(commutator(h, m)).first);
    }
  }
  for (const auto& a : split.m_basis) {
    for (const auto& b : split.m_basis) {
      const auto [h_part, m_part] = parts(commutator(a, b));
      sym = std::max(sym, m_part);  // [m,m] in h violated by the m part
      flat = std::max(flat, h_part);
    }
  }
  out.residuals = {red, sym, flat};
  out.reductive = red <= kInclusionTol;
  out.symmetric = sym <= kInclusionTol;
  out.flat = flat <= kInclusionTol;

  if (!component_reps.empty()) {
    // Ad-invariance of m under each representative (group-level check for
    // disconnected isotropy groups).
    double worst = 0.0;
    for (const auto& rep : component_reps) {
      Eigen::FullPivLU<Matrix> lu(rep);
      if (!lu.isInvertible()) {
        throw std::invalid_argument("classify: singular component rep");
      }
      const Matrix repinv = lu.inverse();
      for (const auto& m : split.m_basis) {
        Matrix ad = rep * m * repinv;
        const double n = ad.norm();
        if (n > 0.0) ad /= n;
        const Coords c = coords_in(qr, bj, vec(ad));
        const double h_part = r > 0 ? (bh * c.c.head(r)).norm() : 0.0;
        worst = std::max(worst, std::max(h_part, c.residual));
      }
    }
    out.residuals[0] = std::max(out.residuals[0], worst);
    out.reductive = out.reductive && worst <= kInclusionTol;
    out.components_checked = true;
  }
  return out;
}

ComplementSearch find_reductive_complements(
    const std::vector<Matrix>& g_basis_in,
    const std::vector<Matrix>& h_basis_in,
    const std::vector<Matrix>& seed_complement) {
  SubalgebraSplit split{g_basis_in, h_basis_in, {}};
  validate_split(split);

  // Unit-normalized working copies keep the linear system well scaled.
  std::vector<Matrix> g_basis = g_basis_in;
  for (auto& m : g_basis) m /= m.norm();
  std::vector<Matrix> h_basis = h_basis_in;
  for (auto& m : h_basis) m /= m.norm();

  const auto n = static_cast<Eigen::Index>(g_basis.size());
  const auto r = static_cast<Eigen::Index>(h_basis.size());
  const Eigen::Index q = n - r;  // dim of the quotient g/h
  if (q <= 0) {
    throw std::invalid_argument(
        "find_reductive_complements: h already spans g");
  }
  const Matrix bg = basis_columns(g_basis);
  const Matrix bh = basis_columns(h_basis);

  // Seed section sigma0: a basis of a complement of h inside span(g).
  std::vector<Matrix> m0 = seed_complement;
  if (m0.empty()) {
    Matrix residual = bg;
    if (r > 0) {
      Eigen::ColPivHouseholderQR<Matrix> qr_h(bh);
      residual -= bh * qr_h.solve(bg);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr_res(residual);
    const auto perm = qr_res.colsPermutation().indices();
    for (Eigen::Index j = 0; j < q; ++j) {
      Matrix cand = unvec(residual.col(perm(j)), g_basis.front().rows(),
                          g_basis.front().cols());
      m0.push_back(cand / cand.norm());
    }
  } else {
    if (static_cast<Eigen::Index>(m0.size()) != q) {
      throw std::invalid_argument(
          "find_reductive_complements: seed complement has wrong dimension");
    }
    SubalgebraSplit seeded{g_basis_in, h_basis_in, seed_complement};
    validate_split(seeded);
    for (auto& m : m0) m /= m.norm();
  }

  std::vector<Matrix> joint = h_basis;
  joint.insert(joint.end(), m0.begin(), m0.end());
  const Matrix bj = basis_columns(joint);
  Eigen::ColPivHouseholderQR<Matrix> qr_joint(bj);
  const auto joint_coords = [&](const Matrix& m) {
    const Coords c = coords_in(qr_joint, bj, vec(m));
    if (c.residual > 1e-8 * std::max(1.0, m.norm())) {
      throw std::invalid_argument(
          "find_reductive_complements: bracket leaves span(g); g is not "
          "closed under the bracket");
    }
    return c.c;
  };

  // Structure data per h generator: ad restricted to h (H), the induced
  // quotient action (A) and the h component of [h_i, m0_j] (D).
  std::vector<Matrix> ad_h(r), ad_q(r), defect(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    ad_h[i] = Matrix::Zero(r, r);
    for (Eigen::Index k = 0; k < r; ++k) {
      const Vector c = joint_coords(commutator(h_basis[i], h_basis[k]));
      ad_h[i].col(k) = c.head(r);
    }
    ad_q[i] = Matrix::Zero(q, q);
    defect[i] = Matrix::Zero(r, q);
    for (Eigen::Index j = 0; j < q; ++j) {
      const Vector c = joint_coords(commutator(h_basis[i], m0[j]));
      defect[i].col(j) = c.head(r);
      ad_q[i].col(j) = c.tail(q);
    }
  }

  ComplementSearch out;
  Matrix alpha = Matrix::Zero(r, q);
  if (r > 0) {
    // Stacked Sylvester-type system: H_i alpha - alpha A_i = -D_i for all i.
    Matrix big = Matrix::Zero(r * q * r, r * q);
    Vector rhs = Vector::Zero(r * q * r);
    const Matrix idq = Matrix::Identity(q, q);
    const Matrix idr = Matrix::Identity(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
      Matrix block = Matrix::Zero(r * q, r * q);
      // vec(H a) = (I (x) H) vec(a); vec(a A) = (A^T (x) I) vec(a)
      for (Eigen::Index bj2 = 0; bj2 < q; ++bj2) {
        for (Eigen::Index bi = 0; bi < q; ++bi) {
          block.block(bi * r, bj2 * r, r, r) =
              idq(bi, bj2) * ad_h[i] - ad_q[i](bj2, bi) * idr;
        }
      }
      big.block(i * r * q, 0, r * q, r * q) = block;
      rhs.segment(i * r * q, r * q) = -vec(defect[i]);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(big);
    const Vector sol = cod.solve(rhs);
    out.residual = (big * sol - rhs).norm();
    if (out.residual > kSectionTol) {
      out.empty = true;
      return out;
    }
    alpha = unvec(sol, r, q);

    // Direction space = nullspace of the stacked system.
    Eigen::JacobiSVD<Matrix> svd(big, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff =
        sv.size() > 0 ? kRankTol * std::max(1.0, sv(0)) : kRankTol;
    for (Eigen::Index c = 0; c < svd.matrixV().cols(); ++c) {
      const bool in_null =
          c >= sv.size() || sv(c) <= cutoff;
      if (!in_null) continue;
      const Matrix da = unvec(svd.matrixV().col(c), r, q);
      std::vector<Matrix> dir;
      for (Eigen::Index j = 0; j < q; ++j) {
        Matrix delta =
            Matrix::Zero(g_basis.front().rows(), g_basis.front().cols());
        for (Eigen::Index k = 0; k < r; ++k) delta += da(k, j) * h_basis[k];
        dir.push_back(delta);
      }
      out.directions.push_back(std::move(dir));
    }
  }

  for (Eigen::Index j = 0; j < q; ++j) {
    Matrix m = m0[j];
    for (Eigen::Index k = 0; k < r; ++k) m += alpha(k, j) * h_basis[k];
    out.complement.push_back(m);
  }
  return out;
}

namespace {

Matrix unit(int n, int i, int j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

Matrix skew_unit(int n, int i, int j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  e(j, i) = -1.0;
  return e;
}

std::vector<Matrix> so_basis(int n) {
  std::vector<Matrix> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out.push_back(skew_unit(n, i, j));
  }
  return out;
}

Matrix embed_pair(const Matrix& a, const Matrix& b) {
  const auto d = a.rows();
  Matrix out = Matrix::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d) = a;
  out.bottomRightCorner(d, d) = b;
  return out;
}

SubalgebraSplit cartan_schouten_split(const std::string& variant) {
  SubalgebraSplit split;
  const Matrix zero3 = Matrix::Zero(3, 3);
  for (const Matrix& xi : so_basis(3)) {
    split.h_basis.push_back(embed_pair(xi, xi));
    if (variant == "mean") {
      split.m_basis.push_back(embed_pair(xi, -xi));
    } else if (variant == "plus") {
      split.m_basis.push_back(embed_pair(xi, zero3));
    } else {
      split.m_basis.push_back(embed_pair(zero3, xi));
    }
  }
  split.g_basis = split.h_basis;
  split.g_basis.insert(split.g_basis.end(), split.m_basis.begin(),
                       split.m_basis.end());
  return split;
}

Matrix affine_embed(int d, const Matrix& lin, const Vector& trans) {
  Matrix out = Matrix::Zero(d + 1, d + 1);
  out.topLeftCorner(d, d) = lin;
  out.topRightCorner(d, 1) = trans;
  return out;
}

}  // namespace

SubalgebraSplit builtin_split(const std::string& name) {
  SubalgebraSplit split;
  if (name == "sphere") {
    // so(3) with the isotropy of the north pole: rotations about e3.
    split.g_basis = so_basis(3);
    split.h_basis = {skew_unit(3, 0, 1)};
    split.m_basis = {skew_unit(3, 0, 2), skew_unit(3, 1, 2)};
    return split;
  }
  if (name == "stiefel_4_2") {
    split.g_basis = so_basis(4);
    split.h_basis = {skew_unit(4, 0, 1)};  // so(2) in the top-left block
    split.m_basis = {skew_unit(4, 0, 2), skew_unit(4, 0, 3),
                     skew_unit(4, 1, 2), skew_unit(4, 1, 3),
                     skew_unit(4, 2, 3)};
    return split;
  }
  if (name == "grassmann_4_2") {
    split.g_basis = so_basis(4);
    split.h_basis = {skew_unit(4, 0, 1), skew_unit(4, 2, 3)};
    split.m_basis = {skew_unit(4, 0, 2), skew_unit(4, 0, 3),
                     skew_unit(4, 1, 2), skew_unit(4, 1, 3)};
    return split;
  }
  if (name == "isospectral_2_1_1") {
    // partition (2,1,1) of d = 4: one block of size two
    split.g_basis = so_basis(4);
    split.h_basis = {skew_unit(4, 0, 1)};
    split.m_basis = {skew_unit(4, 0, 2), skew_unit(4, 0, 3),
                     skew_unit(4, 1, 2), skew_unit(4, 1, 3),
                     skew_unit(4, 2, 3)};
    return split;
  }
  if (name == "isospectral_principal_3") {
    split.g_basis = so_basis(3);
    split.m_basis = so_basis(3);
    return split;
  }
  if (name == "spd_3") {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) split.g_basis.push_back(unit(3, i, j));
    }
    split.h_basis = so_basis(3);
    for (int i = 0; i < 3; ++i) split.m_basis.push_back(unit(3, i, i));
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        split.m_basis.push_back(unit(3, i, j) + unit(3, j, i));
      }
    }
    return split;
  }
  if (name == "maurer_cartan_so3") {
    split.g_basis = so_basis(3);
    split.m_basis = so_basis(3);
    return split;
  }
  if (name == "cartan_schouten_so3_mean") return cartan_schouten_split("mean");
  if (name == "cartan_schouten_so3_plus") return cartan_schouten_split("plus");
  if (name == "cartan_schouten_so3_minus") {
    return cartan_schouten_split("minus");
  }
  if (name == "affine_3") {
    // so(3) |x R^3 in homogeneous coordinates
    for (const Matrix& xi : so_basis(3)) {
      split.h_basis.push_back(affine_embed(3, xi, Vector::Zero(3)));
    }
    for (int i = 0; i < 3; ++i) {
      split.m_basis.push_back(
          affine_embed(3, Matrix::Zero(3, 3), Vector::Unit(3, i)));
    }
    split.g_basis = split.h_basis;
    split.g_basis.insert(split.g_basis.end(), split.m_basis.begin(),
                         split.m_basis.end());
    return split;
  }
  if (name == "affine_scalings_3") {
    // gl(3) |x R^3: the isotropy algebra contains the identity (scalings)
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        split.h_basis.push_back(affine_embed(3, unit(3, i, j), Vector::Zero(3)));
      }
    }
    for (int i = 0; i < 3; ++i) {
      split.m_basis.push_back(
          affine_embed(3, Matrix::Zero(3, 3), Vector::Unit(3, i)));
    }
    split.g_basis = split.h_basis;
    split.g_basis.insert(split.g_basis.end(), split.m_basis.begin(),
                         split.m_basis.end());
    return split;
  }
  if (name == "sl2_nilpotent") {
    Matrix e = Matrix::Zero(2, 2), f = Matrix::Zero(2, 2),
           h = Matrix::Zero(2, 2);
    e(0, 1) = 1.0;
    f(1, 0) = 1.0;
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    split.g_basis = {e, f, h};
    split.h_basis = {e};
    return split;
  }
  std::string known;
  for (const auto& n : builtin_split_names()) known += " " + n;
  throw std::invalid_argument("builtin_split: unknown name '" + name +
                              "'; known:" + known);
}

std::vector<std::string> builtin_split_names() {
  return {"sphere",
          "stiefel_4_2",
          "grassmann_4_2",
          "isospectral_2_1_1",
          "isospectral_principal_3",
          "spd_3",
          "maurer_cartan_so3",
          "cartan_schouten_so3_mean",
          "cartan_schouten_so3_plus",
          "cartan_schouten_so3_minus",
          "affine_3",
          "affine_scalings_3",
          "sl2_nilpotent"};
}

}  // namespace hsflow
