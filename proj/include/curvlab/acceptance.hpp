#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace curvlab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
  std::vector<int> only;  // criterion ids to run; empty runs all twelve
  /// Called with each result as soon as it is available.
  std::function<void(const CriterionResult&)> on_result;
};

constexpr int kCriterionCount = 12;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS  3  Known critical points: ...  [0.1 s]"
std::string format_result(const CriterionResult& r);

}  // namespace curvlab
