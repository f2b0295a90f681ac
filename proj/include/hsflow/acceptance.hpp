#pragma once

#include "hsflow/verify.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hsflow {

/// One residual/slope measurement with its pinned threshold.
struct CheckRecord {
  std::string name;
  std::string params;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparator;  // "<=", ">", "in" (value within +-threshold of target)
  double target = 0.0;     // for comparator "in"
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  std::vector<CheckRecord> records;
};

struct AcceptanceOptions {
  /// Swap the Stiefel connection for a deliberately broken one; the suite
  /// must then fail (exit-nonzero path).
  bool corrupt = false;
  /// Criterion ids to run; empty runs all ten.
  std::vector<int> only;
  Exec exec = Exec::Parallel;
  std::uint64_t seed = 2026;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

bool all_passed(const std::vector<CriterionResult>& results);

/// One human-readable line per criterion plus a final verdict line.
void print_report(std::ostream& out,
                  const std::vector<CriterionResult>& results);

}  // namespace hsflow
