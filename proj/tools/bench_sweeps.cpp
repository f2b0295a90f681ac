// Compares the serial reference sweeps against the OpenMP ones and checks
// they agree bit for bit (per-sample seeding makes the max order-free).

#include "hsflow/skeleton.hpp"
#include "hsflow/spaces.hpp"
#include "hsflow/verify.hpp"

#include <chrono>
#include <cstdio>
#include <omp.h>

namespace {

double time_of(const std::function<double()>& fn, double* result) {
  const auto t0 = std::chrono::steady_clock::now();
  *result = fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void bench(const char* name, const std::function<double(hsflow::Exec)>& fn) {
  double serial_value = 0.0, parallel_value = 0.0;
  const double ts =
      time_of([&] { return fn(hsflow::Exec::Serial); }, &serial_value);
  const double tp =
      time_of([&] { return fn(hsflow::Exec::Parallel); }, &parallel_value);
  const bool same = serial_value == parallel_value;
  std::printf("%-38s serial %8.3fs  openmp %8.3fs  speedup %5.2fx  %s\n",
              name, ts, tp, ts / tp, same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
  const std::uint64_t seed = 99;

  {
    const hsflow::Connection conn = *hsflow::make_space("stiefel:7,3").connection;
    bench("consistency stiefel:7,3 x4000", [&](hsflow::Exec e) {
      return hsflow::check_consistency(conn, 4000, seed, e);
    });
  }
  {
    const hsflow::Connection conn = *hsflow::make_space("spd:4").connection;
    bench("equivariance spd:4 x4000", [&](hsflow::Exec e) {
      return hsflow::check_equivariance(conn, 4000, seed, e);
    });
  }
  {
    const hsflow::Connection conn = *hsflow::make_space("sphere:3").connection;
    const hsflow::Skeleton cf4 = hsflow::named_skeleton("cf4");
    bench("method equivariance sphere:3 cf4 x400", [&](hsflow::Exec e) {
      return hsflow::method_equivariance(cf4, conn, 0.2, 400, seed, e);
    });
  }
  {
    const hsflow::Connection conn =
        *hsflow::make_space("cartan_schouten:so3:mean").connection;
    const hsflow::Skeleton gauss = hsflow::named_skeleton("gauss4");
    bench("method equivariance cartan gauss4 x200", [&](hsflow::Exec e) {
      return hsflow::method_equivariance(gauss, conn, 0.2, 200, seed, e);
    });
  }
  return 0;
}
