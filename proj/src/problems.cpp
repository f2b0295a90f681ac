#include "hsflow/problems.hpp"

#include "hsflow/matexp.hpp"

#include <cmath>

namespace hsflow {

Matrix toda_generator(const Matrix& p) {
  ensure_square(p, "toda_generator");
  Matrix xi = Matrix::Zero(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < p.cols(); ++j) {
      xi(i, j) = p(i, j);
      xi(j, i) = -p(i, j);
    }
  }
  return xi;
}

namespace {

// Embed a point into the ambient square size of the algebra so that a fixed
// ambient matrix can act on it; used by the gradient_like field.
Matrix embed_point(const Matrix& x, int ambient) {
  if (x.rows() == ambient && x.cols() == ambient) return x;
  if (x.cols() < x.rows() && x.rows() == ambient) {
    return x * x.transpose();
  }
  if (x.cols() == 1 && x.rows() + 1 == ambient) {
    Matrix out = Matrix::Zero(ambient, ambient);
    out.topRightCorner(x.rows(), 1) = x;
    return out;
  }
  if (2 * x.rows() == ambient && x.rows() == x.cols()) {
    Matrix out = Matrix::Zero(ambient, ambient);
    out.topLeftCorner(x.rows(), x.rows()) = x;
    out.bottomRightCorner(x.rows(), x.rows()) = x;
    return out;
  }
  throw std::invalid_argument("gradient_like: unsupported point shape");
}

Matrix seeded_generator(const SpaceEntry& entry, std::uint64_t seed,
                        const std::vector<double>& coeffs,
                        bool custom) {
  const AlgebraTag tag = entry.space.algebra_tag;
  if (!custom) return tag.sample(mix_seed(seed, 0x4649454cULL));
  const int amb = tag.ambient_dim();
  if (static_cast<int>(coeffs.size()) != amb * amb) {
    throw std::invalid_argument(
        "custom field: expected " + std::to_string(amb * amb) +
        " coefficients (row-major " + std::to_string(amb) + "x" +
        std::to_string(amb) + "), got " + std::to_string(coeffs.size()));
  }
  Matrix xi(amb, amb);
  for (int i = 0; i < amb; ++i) {
    for (int j = 0; j < amb; ++j) xi(i, j) = coeffs[i * amb + j];
  }
  if (tag.residual(xi) > 1e-10) {
    throw std::invalid_argument("custom field: coefficients violate the " +
                                tag.name() + " constraint");
  }
  return xi;
}

}  // namespace

VectorField make_field(const SpaceEntry& entry, const std::string& name,
                       std::uint64_t seed,
                       const std::vector<double>& coeffs) {
  const HomogeneousSpace& s = entry.space;
  if (name == "constant_rotation" || name == "custom") {
    const Matrix xi0 = seeded_generator(entry, seed, coeffs, name == "custom");
    return [inf_act = s.inf_act, xi0](const Matrix& x) {
      return inf_act(xi0, x);
    };
  }
  if (name == "toda") {
    if (s.origin.rows() != s.origin.cols()) {
      throw std::invalid_argument(
          "toda field: needs a space of symmetric matrices");
    }
    return [inf_act = s.inf_act](const Matrix& p) {
      return inf_act(toda_generator(p), p);
    };
  }
  if (name == "gradient_like") {
    const int amb = s.algebra_tag.ambient_dim();
    Rng rng(mix_seed(seed, 0x47524144ULL));
    const Matrix a =
        rng.gaussian_matrix(amb, amb) / std::sqrt(static_cast<double>(amb));
    return [s, a, amb](const Matrix& x) {
      const Matrix xi = s.algebra_tag.project(a * embed_point(x, amb));
      return s.inf_act(xi, x);
    };
  }
  std::string known;
  for (const auto& n : field_names()) known += " " + n;
  throw std::invalid_argument("make_field: unknown field '" + name +
                              "'; known:" + known);
}

std::vector<std::string> field_names() {
  return {"constant_rotation", "toda", "gradient_like", "custom"};
}

Problem make_problem(const std::string& space_name, const std::string& field,
                     std::uint64_t seed, const std::vector<double>& coeffs) {
  Problem prob{make_space(space_name), nullptr, nullptr, nullptr};
  const SpaceEntry& entry = prob.entry;
  prob.f = make_field(entry, field, seed, coeffs);

  const bool frozen_flow = field == "constant_rotation" || field == "custom";
  if (frozen_flow) {
    const Matrix xi0 =
        seeded_generator(entry, seed, coeffs, field == "custom");
    const HomogeneousSpace s = entry.space;
    prob.exact = [s, xi0](double t, const Matrix& x0) {
      return s.act(expm(t * xi0), x0);
    };
  }

  if (entry.connection) {
    const Connection conn = *entry.connection;
    VectorField f = prob.f;
    prob.nu_of_h = [conn, f](double h) {
      return connection_choice(conn, f, h);
    };
    return prob;
  }

  // Connectionless space (general isospectral): the Lax route.
  const int d = static_cast<int>(entry.space.origin.rows());
  if (field == "toda") {
    prob.nu_of_h = [d](double h) { return lax_choice(toda_generator, d, h); };
    return prob;
  }
  if (frozen_flow) {
    const Matrix xi0 =
        seeded_generator(entry, seed, coeffs, field == "custom");
    prob.nu_of_h = [d, xi0](double h) {
      return lax_choice([xi0](const Matrix&) { return xi0; }, d, h);
    };
    return prob;
  }
  throw std::invalid_argument(
      "make_problem: space '" + space_name +
      "' has no closed-form connection; use the toda, constant_rotation or "
      "custom fields, which supply the generator directly");
}

}  // namespace hsflow
