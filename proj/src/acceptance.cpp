#include "hsflow/acceptance.hpp"

#include "hsflow/algebrachk.hpp"
#include "hsflow/matexp.hpp"
#include "hsflow/problems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>

namespace hsflow {

namespace {

CheckRecord leq(std::string name, std::string params, double value,
                double threshold) {
  CheckRecord r{std::move(name), std::move(params), value, threshold,
                "<=", 0.0, false};
  r.pass = value <= threshold;
  return r;
}

CheckRecord gt(std::string name, std::string params, double value,
               double threshold) {
  CheckRecord r{std::move(name), std::move(params), value, threshold,
                ">", 0.0, false};
  r.pass = value > threshold;
  return r;
}

CheckRecord within(std::string name, std::string params, double value,
                   double target, double halfwidth) {
  CheckRecord r{std::move(name), std::move(params), value, halfwidth,
                "in", target, false};
  r.pass = std::abs(value - target) <= halfwidth;
  return r;
}

Connection suite_connection(const std::string& space_name, bool corrupt,
                            bool for_consistency) {
  if (corrupt && space_name == "stiefel:5,2") {
    return for_consistency ? corrupted_consistency_control(5, 2)
                           : corrupted_equivariance_control(5, 2);
  }
  return *make_space(space_name).connection;
}

const std::vector<std::string> kConnectionCatalog = {
    "sphere:3",
    "stiefel:5,2",
    "grassmann:4,2",
    "projective:3",
    "spd:3",
    "so:3",
    "so:3:right",
    "gl:3",
    "cartan_schouten:so3:mean",
    "cartan_schouten:so3:plus",
    "cartan_schouten:so3:minus",
    "affine:3",
    "affine:3:gl",
};

const std::vector<std::string> kEquivarianceSpaces = {
    "sphere:3", "stiefel:5,2", "grassmann:4,2",
    "spd:3",    "so:3",        "cartan_schouten:so3:mean",
};

const std::vector<std::string> kEquivarianceMethods = {
    "euler_forward", "rkmk4", "cf4", "gauss4"};

CriterionResult criterion_order_zero(const AcceptanceOptions& o) {
  CriterionResult res{1, "order-zero exactness of the nine skeletons", true,
                      0.0, {}};
  const auto t0 = std::chrono::steady_clock::now();
  for (const std::string& space_name : {"so:3", "sphere:3"}) {
    const HomogeneousSpace space = make_space(space_name).space;
    for (const auto& name : skeleton_names()) {
      const double r = order_zero_exactness(named_skeleton(name), space, 20,
                                            mix_seed(o.seed, 1), o.exec);
      res.records.push_back(
          leq("order_zero", std::string(space_name) + " " + name, r, 1e-10));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  res.records.push_back(leq("runtime_seconds", "", secs, 5.0));
  return res;
}

CriterionResult criterion_consistency(const AcceptanceOptions& o) {
  CriterionResult res{2, "connection consistency", true, 0.0, {}};
  for (const auto& name : kConnectionCatalog) {
    const Connection conn = suite_connection(name, o.corrupt, true);
    const double r = check_consistency(conn, 100, mix_seed(o.seed, 2), o.exec);
    res.records.push_back(leq("consistency", name, r, 1e-11));
  }
  return res;
}

CriterionResult criterion_equivariance(const AcceptanceOptions& o) {
  CriterionResult res{3, "connection- and method-level equivariance", true,
                      0.0, {}};
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& name : kEquivarianceSpaces) {
    const Connection conn = suite_connection(name, o.corrupt, false);
    const double r =
        check_equivariance(conn, 100, mix_seed(o.seed, 3), o.exec);
    res.records.push_back(leq("connection_equivariance", name, r, 1e-9));
    for (const auto& method : kEquivarianceMethods) {
      const double m = method_equivariance(named_skeleton(method), conn, 0.2,
                                           100, mix_seed(o.seed, 4), o.exec);
      res.records.push_back(
          leq("method_equivariance", name + " " + method, m, 1e-9));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  res.records.push_back(leq("runtime_seconds", "", secs, 60.0));
  return res;
}

CriterionResult criterion_preservation(const AcceptanceOptions& o) {
  CriterionResult res{4, "manifold preservation along trajectories", true,
                      0.0, {}};
  const Skeleton cf4 = named_skeleton("cf4");

  {
    Problem prob = make_problem("stiefel:5,2", "constant_rotation", o.seed);
    const IsotropyChoice nu = prob.nu_of_h(0.01);
    Matrix q = prob.entry.space.sample_point(mix_seed(o.seed, 5));
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      q = step(cf4, prob.entry.space, nu, q);
      worst = std::max(worst, prob.entry.space.membership(q));
    }
    res.records.push_back(leq("stiefel_orthonormality", "cf4 h=0.01", worst,
                              1e-10));
  }
  {
    Problem prob = make_problem("isospectral:2,1,-1,-2", "toda", o.seed);
    const IsotropyChoice nu = prob.nu_of_h(0.01);
    Matrix p = prob.entry.space.sample_point(mix_seed(o.seed, 6));
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      p = step(cf4, prob.entry.space, nu, p);
      worst = std::max(worst, prob.entry.space.invariant_of(p));
    }
    res.records.push_back(
        leq("toda_spectrum_drift", "cf4 h=0.01 4x4", worst, 1e-8));
  }
  {
    Problem prob = make_problem("spd:3", "constant_rotation", o.seed);
    const IsotropyChoice nu = prob.nu_of_h(0.01);
    Matrix p = prob.entry.space.sample_point(mix_seed(o.seed, 7));
    double lowest = prob.entry.space.invariant_of(p);
    for (int n = 0; n < 100; ++n) {
      p = step(cf4, prob.entry.space, nu, p);
      lowest = std::min(lowest, prob.entry.space.invariant_of(p));
    }
    res.records.push_back(gt("spd_min_eigenvalue", "cf4 h=0.01", lowest, 0.0));
  }
  return res;
}

struct OrderCase {
  std::string method;
  double target;
  double halfwidth;
  std::vector<double> h_list;
  double t_final;
};

CriterionResult criterion_orders(const AcceptanceOptions& o) {
  CriterionResult res{5, "observed convergence orders", true, 0.0, {}};
  const std::vector<OrderCase> cases = {
      {"euler_forward", 1.0, 0.2, {0.2, 0.1, 0.05, 0.025}, 1.0},
      {"implicit_midpoint", 2.0, 0.2, {0.2, 0.1, 0.05, 0.025}, 1.0},
      {"trapezoidal", 2.0, 0.2, {0.2, 0.1, 0.05, 0.025}, 1.0},
      {"rkmk3", 3.0, 0.25, {0.4, 0.2, 0.1, 0.05}, 1.6},
      {"cg3", 3.0, 0.25, {0.4, 0.2, 0.1, 0.05}, 1.6},
      {"rkmk4", 4.0, 0.25, {0.4, 0.2, 0.1, 0.05}, 1.6},
      {"cf4", 4.0, 0.25, {0.4, 0.2, 0.1, 0.05}, 1.6},
      {"gauss4", 4.0, 0.25, {0.4, 0.2, 0.1, 0.05}, 1.6},
  };
  for (const std::string& space_name : {"sphere:3", "so:3"}) {
    const bool closed_form = space_name == "sphere:3";
    Problem prob =
        make_problem(space_name,
                     closed_form ? "constant_rotation" : "gradient_like",
                     o.seed);
    const Matrix x0 = prob.entry.space.sample_point(mix_seed(o.seed, 8));
    for (const auto& c : cases) {
      Matrix reference;
      if (prob.exact) {
        reference = prob.exact(c.t_final, x0);
      } else {
        // refined CF4 reference
        const double h_ref = c.h_list.back() / 100.0;
        const auto steps = static_cast<long>(std::llround(c.t_final / h_ref));
        const IsotropyChoice nu = prob.nu_of_h(h_ref);
        const Skeleton cf4 = named_skeleton("cf4");
        reference = x0;
        for (long n = 0; n < steps; ++n) {
          reference = step(cf4, prob.entry.space, nu, reference);
        }
      }
      const OrderReport report =
          observed_order(named_skeleton(c.method), prob.entry.space,
                         prob.nu_of_h, x0, c.h_list, reference, c.t_final);
      res.records.push_back(within("observed_order",
                                   space_name + " " + c.method,
                                   report.observed_order, c.target,
                                   c.halfwidth));
    }
  }
  return res;
}

CriterionResult criterion_descent(const AcceptanceOptions& o) {
  CriterionResult res{6, "descent from the group to the manifold", true, 0.0,
                      {}};
  {
    Problem prob = make_problem("sphere:3", "gradient_like", o.seed);
    const Matrix x0 = prob.entry.space.sample_point(mix_seed(o.seed, 9));
    const double r = check_descent(named_skeleton("cf4"),
                                   *prob.entry.connection, prob.f, x0, 0.1);
    res.records.push_back(leq("descent", "sphere:3 cf4", r, 1e-10));
  }
  {
    Problem prob = make_problem("grassmann:4,2", "gradient_like", o.seed);
    const Matrix x0 = prob.entry.space.sample_point(mix_seed(o.seed, 10));
    const double r = check_descent(named_skeleton("rkmk4"),
                                   *prob.entry.connection, prob.f, x0, 0.1);
    res.records.push_back(leq("descent", "grassmann:4,2 rkmk4", r, 1e-10));
  }
  return res;
}

CriterionResult criterion_table(const AcceptanceOptions&) {
  CriterionResult res{7, "symmetric/flat table reproduction", true, 0.0, {}};
  struct Row {
    const char* split;
    bool symmetric;
    bool flat;
  };
  const std::vector<Row> rows = {
      {"affine_3", true, true},
      {"affine_scalings_3", true, true},
      {"stiefel_4_2", false, false},
      {"sphere", true, false},
      {"isospectral_2_1_1", false, false},
      {"isospectral_principal_3", false, true},
      {"grassmann_4_2", true, false},
      {"spd_3", true, false},
      {"maurer_cartan_so3", false, true},
      {"cartan_schouten_so3_mean", true, false},
      {"cartan_schouten_so3_plus", false, true},
      {"cartan_schouten_so3_minus", false, true},
  };
  for (const auto& row : rows) {
    const Classification c = classify(builtin_split(row.split));
    const bool ok =
        c.reductive && c.symmetric == row.symmetric && c.flat == row.flat;
    CheckRecord rec;
    rec.name = "classification";
    rec.params = row.split;
    rec.value = ok ? 1.0 : 0.0;
    rec.threshold = 1.0;
    rec.comparator = "==";
    rec.pass = ok;
    res.records.push_back(rec);
  }
  return res;
}

CriterionResult criterion_nonexistence(const AcceptanceOptions& o) {
  CriterionResult res{8, "non-existence of a reductive complement for "
                         "sl(2)/nilpotent",
                      true, 0.0, {}};
  const SubalgebraSplit base = builtin_split("sl2_nilpotent");
  {
    const ComplementSearch search =
        find_reductive_complements(base.g_basis, base.h_basis);
    res.records.push_back(
        gt("section_residual", "sl2_nilpotent", search.residual, 1e-7));
  }
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(mix_seed(o.seed, 11 + trial));
    const Matrix t = expm(0.3 * rng.gaussian_matrix(2, 2));
    const Matrix tinv = t.inverse();
    std::vector<Matrix> g, h;
    for (const auto& m : base.g_basis) g.push_back(t * m * tinv);
    for (const auto& m : base.h_basis) h.push_back(t * m * tinv);
    const ComplementSearch search = find_reductive_complements(g, h);
    res.records.push_back(gt("section_residual",
                             "conjugated trial " + std::to_string(trial),
                             search.residual, 1e-7));
  }
  return res;
}

CriterionResult criterion_classical_limit(const AcceptanceOptions& o) {
  CriterionResult res{9, "classical Runge-Kutta limit on R^3", true, 0.0, {}};
  auto f = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(x(1) * x(2) - std::sin(x(0)),
                           std::cos(x(0)) - x(2) * x(2),
                           x(0) + 0.5 * x(1));
  };
  Matrix a = Matrix::Zero(4, 4);
  a(1, 0) = 0.5;
  a(2, 1) = 0.5;
  a(3, 2) = 1.0;
  Vector b(4);
  b << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6;
  const Skeleton rk4 = from_butcher(a, b);

  auto [space, conn] = affine_space("orthogonal", 3);
  VectorField field = [f](const Matrix& x) {
    return Matrix(f(Eigen::Vector3d(x)));
  };
  const double h = 0.05;
  const IsotropyChoice nu = connection_choice(conn, field, h);

  Rng rng(mix_seed(o.seed, 12));
  Matrix x = rng.gaussian_matrix(3, 1);
  Eigen::Vector3d y = Eigen::Vector3d(x);
  double worst = 0.0;
  for (int n = 0; n < 10; ++n) {
    x = step(rk4, space, nu, x);
    const Eigen::Vector3d k1 = f(y);
    const Eigen::Vector3d k2 = f(y + 0.5 * h * k1);
    const Eigen::Vector3d k3 = f(y + 0.5 * h * k2);
    const Eigen::Vector3d k4 = f(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    worst = std::max(worst, (Eigen::Vector3d(x) - y).norm());
  }
  res.records.push_back(leq("rk4_match", "affine:3, 10 steps h=0.05", worst,
                            1e-12));
  return res;
}

CriterionResult criterion_negative_controls(const AcceptanceOptions& o) {
  CriterionResult res{10, "negative controls discriminate", true, 0.0, {}};
  {
    const double r = check_consistency(corrupted_consistency_control(5, 2),
                                       100, mix_seed(o.seed, 13), o.exec);
    res.records.push_back(
        gt("corrupted_consistency", "stiefel:5,2 dropped term", r, 1e-3));
  }
  {
    const double r = check_equivariance(corrupted_equivariance_control(5, 2),
                                        100, mix_seed(o.seed, 14), o.exec);
    res.records.push_back(
        gt("corrupted_equivariance", "stiefel:5,2 fixed h offset", r, 1e-3));
  }
  {
    // Cayley-motion forward Euler is not exact on constant choices.
    Skeleton euler = named_skeleton("euler_forward");
    euler.motion = MotionMap::Cayley;
    const HomogeneousSpace space = make_space("so:3").space;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Matrix xi = space.algebra_tag.sample(mix_seed(o.seed, 100 + i));
      const Matrix x0 = space.sample_point(mix_seed(o.seed, 200 + i));
      const IsotropyChoice nu =
          constant_choice(AlgebraElement::checked(xi, space.algebra_tag));
      worst = std::max(
          worst, (step(euler, space, nu, x0) - space.act(expm(xi), x0)).norm());
    }
    res.records.push_back(
        gt("cayley_euler_inexact", "so:3, |xi| = 1", worst, 1e-6));
  }
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  using Criterion = std::function<CriterionResult(const AcceptanceOptions&)>;
  const std::vector<Criterion> criteria = {
      criterion_order_zero,   criterion_consistency,
      criterion_equivariance, criterion_preservation,
      criterion_orders,       criterion_descent,
      criterion_table,        criterion_nonexistence,
      criterion_classical_limit, criterion_negative_controls,
  };
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) ==
            options.only.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = criteria[i](options);
    } catch (const std::exception& err) {
      res.id = id;
      res.title = "criterion " + std::to_string(id);
      CheckRecord rec;
      rec.name = "exception";
      rec.params = err.what();
      rec.comparator = "==";
      rec.pass = false;
      res.records.push_back(rec);
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.pass = std::all_of(res.records.begin(), res.records.end(),
                           [](const CheckRecord& r) { return r.pass; });
    results.push_back(std::move(res));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.pass; });
}

void print_report(std::ostream& out,
                  const std::vector<CriterionResult>& results) {
  for (const auto& res : results) {
    out << (res.pass ? "PASS" : "FAIL") << "  criterion " << res.id << ": "
        << res.title << "  [" << res.records.size() << " checks, "
        << res.seconds << " s]\n";
    for (const auto& rec : res.records) {
      if (rec.pass) continue;
      out << "      failed: " << rec.name
          << (rec.params.empty() ? "" : " (" + rec.params + ")")
          << "  value=" << rec.value;
      if (rec.comparator == "in") {
        out << "  wanted " << rec.target << " +- " << rec.threshold;
      } else {
        out << "  wanted " << rec.comparator << " " << rec.threshold;
      }
      out << "\n";
    }
  }
  out << (all_passed(results) ? "ALL CRITERIA PASSED" : "CRITERIA FAILED")
      << "\n";
}

}  // namespace hsflow
