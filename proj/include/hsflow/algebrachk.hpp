#pragma once

#include "hsflow/matrix.hpp"

#include <array>
#include <string>
#include <vector>

namespace hsflow {

/// Bases for g, a subalgebra h, and optionally a candidate complement m.
struct SubalgebraSplit {
  std::vector<Matrix> g_basis;
  std::vector<Matrix> h_basis;
  std::vector<Matrix> m_basis;  // empty when no candidate is supplied
};

/// Basic sanity of a split: equal shapes, independence of g, h a subalgebra,
/// h (+ m) contained in span(g), and h + m spanning g when m is present.
/// Throws std::invalid_argument on violation.
void validate_split(const SubalgebraSplit& split);

struct Classification {
  bool reductive = false;  // [h, m] in m
  bool symmetric = false;  // [m, m] in h
  bool flat = false;       // [m, m] in m
  /// Max norms violating each inclusion, on unit-normalized brackets,
  /// in the order (reductive, symmetric, flat).
  std::array<double, 3> residuals{0.0, 0.0, 0.0};
  /// True when Ad-invariance under supplied isotropy-component
  /// representatives was verified on top of the Lie-algebra criterion.
  bool components_checked = false;
};

/// Decide reductive / symmetric / flat for the candidate complement by
/// projecting all pairwise brackets onto the joint (h, m) basis. The
/// Lie-algebra criterion [h, m] in m is what is verified; for disconnected
/// isotropy groups, pass representatives of the non-identity components and
/// Ad-invariance of m under each is checked as well.
Classification classify(const SubalgebraSplit& split,
                        const std::vector<Matrix>& component_reps = {});

/// Affine solution set of the reductive-complement problem, or EMPTY.
struct ComplementSearch {
  bool empty = false;
  double residual = 0.0;  // best least-squares residual of the section system
  /// Basis of a particular reductive complement (empty when EMPTY).
  std::vector<Matrix> complement;
  /// Basis of the direction space Lin_H(g/h, h): each entry perturbs the
  /// complement basis elementwise.
  std::vector<std::vector<Matrix>> directions;
};

/// Search the affine space of H-equivariant linear sections g/h -> g for
/// reductive complements: solves the linear system [xi, sigma(x)] =
/// sigma([xi, x] mod h) in the correction alpha: g/h -> h. `seed_complement`
/// optionally fixes the zero-correction section; by default it is built from
/// the basis complement of h in g.
ComplementSearch find_reductive_complements(
    const std::vector<Matrix>& g_basis, const std::vector<Matrix>& h_basis,
    const std::vector<Matrix>& seed_complement = {});

/// Named splits for the catalog spaces (sphere, stiefel_4_2, grassmann_4_2,
/// isospectral_2_1_1, isospectral_principal_3, spd_3, maurer_cartan_so3,
/// cartan_schouten_so3_{mean,plus,minus}, affine_3, affine_scalings_3,
/// sl2_nilpotent).
SubalgebraSplit builtin_split(const std::string& name);

std::vector<std::string> builtin_split_names();

}  // namespace hsflow
