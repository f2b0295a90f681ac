#pragma once

#include "hsflow/isotropy.hpp"
#include "hsflow/spaces.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hsflow {

/// Skew generator of the Toda-type Lax flow P' = [xi(P), P]:
/// xi(P) = P_+ - P_- (strictly upper minus strictly lower part).
Matrix toda_generator(const Matrix& p);

/// Named test fields on a catalog space:
///   constant_rotation  frozen flow of a fixed seeded algebra element
///   toda               Lax flow generated by toda_generator
///   gradient_like      position-dependent generator, nonlinear in x
///   custom             frozen flow of a caller-supplied algebra element
VectorField make_field(const SpaceEntry& entry, const std::string& name,
                       std::uint64_t seed,
                       const std::vector<double>& coeffs = {});

std::vector<std::string> field_names();

/// Everything an experiment needs: the space, the field, the (time-step
/// scaled) isotropy choice factory and, when the field is a frozen flow,
/// its closed-form solution.
struct Problem {
  SpaceEntry entry;
  VectorField f;
  std::function<IsotropyChoice(double h)> nu_of_h;
  /// exact(t, x0); null when no closed form exists.
  std::function<Matrix(double, const Matrix&)> exact;
};

Problem make_problem(const std::string& space_name, const std::string& field,
                     std::uint64_t seed,
                     const std::vector<double>& coeffs = {});

}  // namespace hsflow
