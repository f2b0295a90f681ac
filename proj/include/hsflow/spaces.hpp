#pragma once

#include "hsflow/isotropy.hpp"
#include "hsflow/matrix.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hsflow {

/// One catalog entry: a manifold M with a transitive matrix-group action.
/// Points, group elements and algebra elements are all plain matrices; coset
/// structure never appears explicitly.
struct HomogeneousSpace {
  std::string name;
  AlgebraTag algebra_tag;
  Matrix origin;

  std::function<Matrix(const Matrix& g, const Matrix& x)> act;
  /// Derivative of act in x (all catalog actions are affine in x).
  std::function<Matrix(const Matrix& g, const Matrix& v)> act_tangent;
  /// Derivative of t -> act(expm(t xi), x) at t = 0.
  std::function<Matrix(const Matrix& xi, const Matrix& x)> inf_act;
  /// Distance-to-manifold diagnostic; 0 on the manifold.
  std::function<double(const Matrix& x)> membership;

  std::function<Matrix(std::uint64_t seed)> sample_group;
  std::function<Matrix(const Matrix& x, std::uint64_t seed)> sample_tangent;

  // Principal-bundle extras; null when the space does not support them.
  /// Some g with act(g, origin) = x.
  std::function<Matrix(const Matrix& x)> lift_point;
  /// Frobenius-orthogonal projection onto the isotropy algebra at the origin.
  std::function<Matrix(const Matrix& xi)> h_project;
  /// The symmetry group itself as a homogeneous space (left action).
  std::function<HomogeneousSpace()> group_space;

  /// Named per-space invariant reported in trajectories (defaults to
  /// membership).
  std::string invariant_name = "membership";
  std::function<double(const Matrix& x)> invariant;

  Matrix sample_point(std::uint64_t seed) const {
    return act(sample_group(seed), origin);
  }
  double invariant_of(const Matrix& x) const {
    return invariant ? invariant(x) : membership(x);
  }
};

/// Consistent equivariant algebra-valued one-form, evaluated as
/// (point, tangent) -> algebra element.
struct Connection {
  HomogeneousSpace space;
  std::function<Matrix(const Matrix& x, const Matrix& v)> eval;
};

// ---- catalog ----

/// R^d under H |x R^d in homogeneous coordinates; isotropy_tag is
/// "orthogonal" or "full_gl". Connection: pure translation block.
std::pair<HomogeneousSpace, Connection> affine_space(
    const std::string& isotropy_tag, int d);

/// n x k matrices with orthonormal columns under SO(n), 1 <= k < n.
std::pair<HomogeneousSpace, Connection> stiefel(int n, int k);

/// Unit sphere in R^d, i.e. Stiefel k = 1 with the simplified two-term
/// connection.
std::pair<HomogeneousSpace, Connection> sphere(int d);

/// Symmetric matrices with prescribed spectrum under conjugation by SO(d).
/// `eigs` lists (value, multiplicity); at least two distinct values required.
HomogeneousSpace isospectral(
    const std::vector<std::pair<double, int>>& eigs);

/// Closed-form connection on an isospectral space with exactly two distinct
/// eigenvalues (Grassmannian-type). Errors otherwise.
Connection grassmann_connection(const HomogeneousSpace& space);

/// Grassmannian of k-planes in R^n as projectors (spectrum {1,0}).
std::pair<HomogeneousSpace, Connection> grassmann(int n, int k);

/// Wraps a user-supplied Lax generator xi(P) (skew, checked at evaluation)
/// as the isotropy choice nu(P) = h * xi(P).
IsotropyChoice lax_choice(std::function<Matrix(const Matrix&)> xi_of_p,
                          int d, double h = 1.0);

/// Symmetric positive definite matrices under congruence by GL(d);
/// connection via the symmetric Sylvester solve.
std::pair<HomogeneousSpace, Connection> spd_space(int d);

/// A matrix group acting on itself; group_tag is "so" or "gl", side is
/// "left" or "right". Connection: the corresponding Maurer-Cartan form.
std::pair<HomogeneousSpace, Connection> lie_group_space(
    const std::string& group_tag, int d, const std::string& side);

/// G under GxG with (g1,g2) |> g = g1 g g2^{-1}; algebra elements are
/// block-diagonal pairs. variant is "plus", "minus" or "mean".
std::pair<HomogeneousSpace, Connection> cartan_schouten(
    const std::string& group_tag, int d, const std::string& variant);

/// Horizontal lift of a vector field on M to the group:
/// g -> omega(pi(g), f(pi(g))) * g.
VectorField lift(const Connection& conn, VectorField f);

/// Isotropy choice nu(x) = h * omega(x, f(x)) from a connection.
IsotropyChoice connection_choice(const Connection& conn, VectorField f,
                                 double h);

// ---- registry ----

struct SpaceEntry {
  HomogeneousSpace space;
  std::optional<Connection> connection;
};

/// Resolve a registry name such as "sphere:3", "stiefel:5,2",
/// "grassmann:4,2", "isospectral:2,1,-1,-2", "spd:3", "so:3", "gl:3:right",
/// "cartan_schouten:so3:mean", "affine:3". Throws on unknown names.
SpaceEntry make_space(const std::string& name);

/// Human-readable list of registry name patterns with examples.
std::vector<std::string> space_catalog();

}  // namespace hsflow
