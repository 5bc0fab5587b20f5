#pragma once

#include <string>
#include <vector>

#include "mbep/parallel.hpp"

namespace mbep {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

inline constexpr int kCriterionCount = 12;

// Runs one acceptance criterion (1..12). Exceptions inside a criterion are
// reported as a failure with the message as detail.
CriterionResult run_criterion(int id, Execution exec = Execution::serial);
std::vector<CriterionResult> run_acceptance(Execution exec = Execution::serial);

// "PASS  3 kron-sum theorem: ..." style line.
std::string format_result(const CriterionResult& r);

}  // namespace mbep
