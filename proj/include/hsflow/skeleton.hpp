#pragma once

#include "hsflow/isotropy.hpp"
#include "hsflow/spaces.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hsflow {

/// Undirected tree of stages with marked initial and final vertices.
struct StageTree {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
  std::string initial;
  std::string final_vertex;
};

/// Read-only view of the frozen fields (and auxiliary variables) a
/// transition function may consume.
class FieldView {
 public:
  FieldView(const std::map<std::string, Matrix>* frozen,
            const std::map<std::string, Matrix>* aux, int ambient_dim)
      : frozen_(frozen), aux_(aux), dim_(ambient_dim) {}

  const Matrix& operator()(const std::string& label) const;
  int ambient_dim() const { return dim_; }
  Matrix zero() const { return Matrix::Zero(dim_, dim_); }

 private:
  const std::map<std::string, Matrix>* frozen_;
  const std::map<std::string, Matrix>* aux_;
  int dim_;
};

/// Transition function tau_{to,from} attached to the edge {to, from};
/// the engine uses the negation when traversing the edge backwards.
/// `reads` lists every frozen-field / auxiliary label the callable consumes.
struct TransitionRule {
  std::string to;
  std::string from;
  std::vector<std::string> reads;
  std::function<Matrix(const FieldView&)> combine;
};

/// Rule for a linear combination sum coef * F(label).
TransitionRule linear_rule(
    std::string to, std::string from,
    std::vector<std::pair<double, std::string>> terms);

/// Implicit auxiliary-variable block (used by the symmetric Gauss method):
/// values seeded from the frozen fields and re-updated once per fixed-point
/// sweep.
struct AuxiliarySystem {
  std::vector<std::string> names;
  std::vector<std::string> reads;  // stage labels the update consumes
  std::function<std::map<std::string, Matrix>(const FieldView& frozen)> seed;
  std::function<std::map<std::string, Matrix>(const FieldView& frozen,
                                              const FieldView& aux)>
      update;
};

enum class MotionMap { Exponential, Cayley };

/// A Lie group integrator stripped of its isotropy map: stage tree, one
/// transition rule per edge, and a motion map.
struct Skeleton {
  std::string name;
  StageTree tree;
  std::vector<TransitionRule> rules;
  MotionMap motion = MotionMap::Exponential;
  std::optional<AuxiliarySystem> auxiliary;
  /// Labels whose frozen field is evaluated; the complement is the paper's
  /// shaded vertices. Filled by validate().
  std::set<std::string> used_vertices;
};

/// Checks tree shape, rule/edge correspondence and label hygiene; fills
/// used_vertices. Throws std::invalid_argument on malformed skeletons.
void validate_skeleton(Skeleton& skel);

/// Replace rule `idx` by its negation on the reversed edge. Produces the
/// same method; exists so tests can pin that down bitwise.
Skeleton flip_rule(const Skeleton& skel, std::size_t idx);

class FixedPointError : public std::runtime_error {
 public:
  FixedPointError(int iterations, double residual);
  int iterations;
  double residual;
};

class ManifoldDriftError : public std::runtime_error {
 public:
  ManifoldDriftError(std::string vertex, double distance);
  std::string vertex;
  double distance;
};

struct StepStats {
  Matrix x1;
  int sweeps = 0;          // 1 for explicit skeletons
  double residual = 0.0;   // last fixed-point increment
  bool explicit_path = false;
};

/// One step of the method skeleton o nu from x0. Explicit skeletons are
/// evaluated by a single topological sweep; implicit stage or auxiliary
/// dependencies are resolved by fixed-point iteration seeded at nu(x0)
/// (absolute tolerance 1e-13 on successive iterates, at most 200 sweeps).
StepStats step_detailed(const Skeleton& skel, const HomogeneousSpace& space,
                        const IsotropyChoice& nu, const Matrix& x0);

Matrix step(const Skeleton& skel, const HomogeneousSpace& space,
            const IsotropyChoice& nu, const Matrix& x0);

/// Skeleton of a classical Runge-Kutta method with tableau (a, b):
/// star tree with edges initial->i carrying sum_j a_ij F_j and
/// initial->final carrying sum_j b_j F_j; motion map exp.
Skeleton from_butcher(const Matrix& a, const Vector& b);

/// The method library: euler_forward, euler_backward, trapezoidal,
/// implicit_midpoint, rkmk3, rkmk4, cg3, cf4, gauss4.
Skeleton named_skeleton(const std::string& name);

std::vector<std::string> skeleton_names();

}  // namespace hsflow
