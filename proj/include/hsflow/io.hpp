#pragma once

#include "hsflow/algebrachk.hpp"
#include "hsflow/matrix.hpp"
#include "hsflow/spaces.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hsflow {

/// Experiment description; every field an experiment needs is mandatory in
/// the config file, there are no hidden defaults.
struct ExperimentConfig {
  std::string space;
  std::string method;
  std::string field;
  std::string x0;  // "sample" or "origin"
  std::uint64_t seed = 0;
  std::string out;  // output file name
  // run
  double step = 0.0;
  long steps = 0;
  // orders
  double t_final = 0.0;
  std::vector<double> h_list;
  // field = custom
  std::vector<double> field_coeffs;
};

/// Parse a key = value config file. `mode` is "run" or "orders" and decides
/// which keys are required. Unknown keys are an error.
ExperimentConfig load_config(const std::string& path, const std::string& mode);

/// Structured-text basis format: repeated blocks
///   matrix <h|m|g> <name> <rows> <cols>
/// followed by the rows. g_basis collects every matrix in file order.
SubalgebraSplit load_basis_file(const std::string& path);
void save_basis_file(const std::string& path, const SubalgebraSplit& split);

/// One row per step: index, time, flattened point (row-major) and the
/// per-space invariant column, all at 17 significant digits.
void write_trajectory_csv(std::ostream& out, const HomogeneousSpace& space,
                          const std::vector<Matrix>& points, double step);

std::string format_real(double v);  // %.17g

}  // namespace hsflow
