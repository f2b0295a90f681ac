#pragma once

#include "hsflow/skeleton.hpp"
#include "hsflow/spaces.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace hsflow {

/// Residual sweeps run either serially or across OpenMP threads. Samples are
/// seeded independently, so both paths produce identical maxima; the serial
/// path is the reference the parallel one is tested against.
enum class Exec { Serial, Parallel };

/// max over `samples` of kernel(sample_seed); deterministic given seed.
double max_over_samples(int samples, std::uint64_t seed, Exec exec,
                        const std::function<double(std::uint64_t)>& kernel);

/// Consistency condition: inf_act(omega(x, v), x) = v over random (x, v).
double check_consistency(const Connection& conn, int samples,
                         std::uint64_t seed, Exec exec = Exec::Serial);

/// Connection equivariance: omega(g|>x, g.v) = g omega(x, v) g^{-1}.
double check_equivariance(const Connection& conn, int samples,
                          std::uint64_t seed, Exec exec = Exec::Serial);

/// Method-level equivariance: step(skel, g.nu, g|>x0) = g |> step(skel, nu, x0)
/// with nu = h * omega(., f) for Killing test fields f.
double method_equivariance(const Skeleton& skel, const Connection& conn,
                           double h, int samples, std::uint64_t seed,
                           Exec exec = Exec::Serial);

/// Order-zero exactness: step with constant choice xi reproduces
/// expm(xi) |> x0, over random unit-norm xi and random x0.
double order_zero_exactness(const Skeleton& skel,
                            const HomogeneousSpace& space, int samples,
                            std::uint64_t seed, Exec exec = Exec::Serial);

/// Principal-form checks for theta(X) = g^{-1} X - g^{-1} omega([X]) g:
/// values in the isotropy algebra, vertical reproduction, H-equivariance and
/// left-invariance. Requires the space's point lift.
double check_principal_form(const Connection& conn, int samples,
                            std::uint64_t seed, Exec exec = Exec::Serial);

/// One step on the group applied to the horizontally lifted field, projected
/// back to M, against one step on M directly.
double check_descent(const Skeleton& skel, const Connection& conn,
                     const VectorField& f, const Matrix& x0, double h);

/// Finite-difference validation of inf_act at displacement t.
double inf_act_fd_residual(const HomogeneousSpace& space, double t,
                           int samples, std::uint64_t seed,
                           Exec exec = Exec::Serial);

struct OrderReport {
  std::vector<double> step_sizes;
  std::vector<double> errors;
  double observed_order = 0.0;      // least-squares slope of log e vs log h
  bool exact_to_precision = false;  // errors at rounding level, no slope
};

/// Empirical convergence order at final time t_final against a reference
/// point. h_list must be decreasing with at least 4 levels, each dividing
/// t_final into an integral number of steps.
OrderReport observed_order(const Skeleton& skel, const HomogeneousSpace& space,
                           const std::function<IsotropyChoice(double)>& nu_of_h,
                           const Matrix& x0, const std::vector<double>& h_list,
                           const Matrix& reference, double t_final);

// Negative controls: connections broken in specific, detectable ways. The
// harness is tested for discriminative power against them.

/// Stiefel connection with the third term dropped; inconsistent for k >= 2.
Connection corrupted_consistency_control(int n, int k);

/// Stiefel connection plus a fixed isotropy-algebra element at every point;
/// breaks Ad-equivariance.
Connection corrupted_equivariance_control(int n, int k);

}  // namespace hsflow
