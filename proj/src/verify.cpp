#include "hsflow/verify.hpp"

#include "hsflow/matexp.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace hsflow {

double max_over_samples(int samples, std::uint64_t seed, Exec exec,
                        const std::function<double(std::uint64_t)>& kernel) {
  if (samples < 1) throw std::invalid_argument("max_over_samples: samples < 1");
  double acc = 0.0;
  if (exec == Exec::Parallel) {
    std::exception_ptr error = nullptr;
#pragma omp parallel for reduction(max : acc) schedule(dynamic)
    for (int i = 0; i < samples; ++i) {
      try {
        acc = std::max(acc, kernel(mix_seed(seed, i)));
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (int i = 0; i < samples; ++i) {
      acc = std::max(acc, kernel(mix_seed(seed, i)));
    }
  }
  return acc;
}

double check_consistency(const Connection& conn, int samples,
                         std::uint64_t seed, Exec exec) {
  const HomogeneousSpace& s = conn.space;
  return max_over_samples(samples, seed, exec, [&](std::uint64_t k) {
    const Matrix x = s.sample_point(mix_seed(k, 1));
    const Matrix v = s.sample_tangent(x, mix_seed(k, 2));
    return (s.inf_act(conn.eval(x, v), x) - v).norm();
  });
}

double check_equivariance(const Connection& conn, int samples,
                          std::uint64_t seed, Exec exec) {
  const HomogeneousSpace& s = conn.space;
  return max_over_samples(samples, seed, exec, [&](std::uint64_t k) {
    const Matrix x = s.sample_point(mix_seed(k, 1));
    const Matrix v = s.sample_tangent(x, mix_seed(k, 2));
    const Matrix g = s.sample_group(mix_seed(k, 3));
    const Matrix lhs = conn.eval(s.act(g, x), s.act_tangent(g, v));
    const Matrix rhs = g * conn.eval(x, v) * g.inverse();
    return (lhs - rhs).norm();
  });
}

double method_equivariance(const Skeleton& skel, const Connection& conn,
                           double h, int samples, std::uint64_t seed,
                           Exec exec) {
  const HomogeneousSpace& s = conn.space;
  return max_over_samples(samples, seed, exec, [&](std::uint64_t k) {
    const Matrix x0 = s.sample_point(mix_seed(k, 1));
    const Matrix xi0 = s.algebra_tag.sample(mix_seed(k, 2));
    const Matrix g = s.sample_group(mix_seed(k, 3));
    const Matrix ginv = g.inverse();
    VectorField f = [&s, xi0](const Matrix& x) { return s.inf_act(xi0, x); };
    const IsotropyChoice nu = connection_choice(conn, f, h);
    // (g . nu)(x) = g nu(g^{-1} |> x) g^{-1}
    const IsotropyChoice nu_g{
        nu.tag, [&](const Matrix& x) {
          return Matrix(g * nu.raw(s.act(ginv, x)) * ginv);
        }};
    const Matrix lhs = step(skel, s, nu_g, s.act(g, x0));
    const Matrix rhs = s.act(g, step(skel, s, nu, x0));
    return (lhs - rhs).norm();
  });
}

double order_zero_exactness(const Skeleton& skel,
                            const HomogeneousSpace& space, int samples,
                            std::uint64_t seed, Exec exec) {
  if (skel.motion != MotionMap::Exponential) {
    throw std::invalid_argument(
        "order_zero_exactness: motion map must be the exponential");
  }
  return max_over_samples(samples, seed, exec, [&](std::uint64_t k) {
    const Matrix xi = space.algebra_tag.sample(mix_seed(k, 1));
    const Matrix x0 = space.sample_point(mix_seed(k, 2));
    const IsotropyChoice nu =
        constant_choice(AlgebraElement::checked(xi, space.algebra_tag));
    const Matrix got = step(skel, space, nu, x0);
    const Matrix want = space.act(expm(xi), x0);
    return (got - want).norm();
  });
}

double check_principal_form(const Connection& conn, int samples,
                            std::uint64_t seed, Exec exec) {
  const HomogeneousSpace& s = conn.space;
  if (!s.lift_point || !s.h_project) {
    throw std::invalid_argument(
        "check_principal_form: space '" + s.name +
        "' does not expose a point lift / isotropy projection");
  }
  auto theta = [&](const Matrix& g, const Matrix& ginv, const Matrix& x_tan) {
    // x_tan is a tangent vector at g; [X] = inf_act(X g^{-1}, pi(g)).
    const Matrix base = s.act(g, s.origin);
    const Matrix projected = s.inf_act(x_tan * ginv, base);
    return Matrix(ginv * x_tan - ginv * conn.eval(base, projected) * g);
  };
  return max_over_samples(samples, seed, exec, [&](std::uint64_t k) {
    const Matrix g = s.sample_group(mix_seed(k, 1));
    const Matrix ginv = g.inverse();
    const Matrix xi = s.algebra_tag.sample(mix_seed(k, 2));
    const Matrix x_tan = xi * g;  // tangent at g

    double worst = 0.0;
    // (a) theta takes values in the isotropy algebra
    const Matrix th = theta(g, ginv, x_tan);
    worst = std::max(worst, (th - s.h_project(th)).norm());
    // (b) vertical reproduction: theta(g xi_h) = xi_h
    const Matrix xi_h = s.h_project(s.algebra_tag.sample(mix_seed(k, 3)));
    worst = std::max(worst, (theta(g, ginv, Matrix(g * xi_h)) - xi_h).norm());
    // (c) H-equivariance: theta(X h) = h^{-1} theta(X) h
    const Matrix hh = expm(s.h_project(s.algebra_tag.sample(mix_seed(k, 4))));
    const Matrix hinv = hh.inverse();
    const Matrix gh = g * hh;
    worst = std::max(
        worst, (theta(gh, Matrix(hinv * ginv), Matrix(x_tan * hh)) -
                hinv * th * hh)
                   .norm());
    // (d) left invariance: theta(gbar X) at gbar g equals theta(X) at g
    const Matrix gbar = s.sample_group(mix_seed(k, 5));
    worst = std::max(worst,
                     (theta(Matrix(gbar * g), Matrix(ginv * gbar.inverse()),
                            Matrix(gbar * x_tan)) -
                      th)
                         .norm());
    return worst;
  });
}

double check_descent(const Skeleton& skel, const Connection& conn,
                     const VectorField& f, const Matrix& x0, double h) {
  const HomogeneousSpace& s = conn.space;
  if (!s.lift_point || !s.group_space) {
    throw std::invalid_argument("check_descent: space '" + s.name +
                                "' has no point lift / group space");
  }
  const HomogeneousSpace group = s.group_space();
  const IsotropyChoice nu_m = connection_choice(conn, f, h);
  // Maurer-Cartan form applied to the lifted field: the choice on the group
  // is nu_m pulled back through the bundle projection.
  const IsotropyChoice nu_g{
      group.algebra_tag,
      [&s, raw = nu_m.raw](const Matrix& g) {
        return raw(s.act(g, s.origin));
      }};
  const Matrix g0 = s.lift_point(x0);
  const Matrix g1 = step(skel, group, nu_g, g0);
  const Matrix via_group = s.act(g1, s.origin);
  const Matrix direct = step(skel, s, nu_m, x0);
  return (via_group - direct).norm();
}

double inf_act_fd_residual(const HomogeneousSpace& space, double t,
                           int samples, std::uint64_t seed, Exec exec) {
  return max_over_samples(samples, seed, exec, [&](std::uint64_t k) {
    const Matrix x = space.sample_point(mix_seed(k, 1));
    const Matrix xi = space.algebra_tag.sample(mix_seed(k, 2));
    const Matrix fd = (space.act(expm(t * xi), x) - x) / t;
    return (fd - space.inf_act(xi, x)).norm();
  });
}

OrderReport observed_order(const Skeleton& skel, const HomogeneousSpace& space,
                           const std::function<IsotropyChoice(double)>& nu_of_h,
                           const Matrix& x0, const std::vector<double>& h_list,
                           const Matrix& reference, double t_final) {
  if (h_list.size() < 4) {
    throw std::invalid_argument("observed_order: need >= 4 step-size levels");
  }
  for (std::size_t i = 1; i < h_list.size(); ++i) {
    if (!(h_list[i] < h_list[i - 1])) {
      throw std::invalid_argument("observed_order: h_list must decrease");
    }
  }
  OrderReport report;
  report.step_sizes = h_list;
  for (const double h : h_list) {
    const double steps_real = t_final / h;
    const auto steps = static_cast<long>(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9) {
      throw std::invalid_argument(
          "observed_order: t_final must be an integral number of steps of " +
          std::to_string(h));
    }
    const IsotropyChoice nu = nu_of_h(h);
    Matrix x = x0;
    for (long n = 0; n < steps; ++n) x = step(skel, space, nu, x);
    report.errors.push_back((x - reference).norm());
  }
  const double floor =
      100.0 * std::numeric_limits<double>::epsilon();
  if (report.errors.front() < floor) {
    report.exact_to_precision = true;
    report.observed_order = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  // Least-squares slope of log(error) against log(h).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(h_list.size());
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (report.errors[i] <= 0.0) {
      report.exact_to_precision = true;
      report.observed_order = std::numeric_limits<double>::quiet_NaN();
      return report;
    }
    const double lx = std::log(h_list[i]);
    const double ly = std::log(report.errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  report.observed_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return report;
}

Connection corrupted_consistency_control(int n, int k) {
  auto [space, conn] = stiefel(n, k);
  (void)conn;
  Connection bad;
  bad.space = space;
  bad.eval = [](const Matrix& q, const Matrix& dq) {
    return Matrix(dq * q.transpose() - q * dq.transpose());
  };
  return bad;
}

Connection corrupted_equivariance_control(int n, int k) {
  auto [space, conn] = stiefel(n, k);
  Matrix offset = Matrix::Zero(n, n);
  offset(0, 1) = 0.05;  // fixed element of the isotropy algebra so(n-k)
  offset(1, 0) = -0.05;
  Connection bad;
  bad.space = space;
  bad.eval = [inner = conn.eval, offset](const Matrix& q, const Matrix& dq) {
    return Matrix(inner(q, dq) + offset);
  };
  return bad;
}

}  // namespace hsflow
