// Runs every acceptance criterion and prints one PASS/FAIL line each.

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "mbep/acceptance.hpp"

int main(int argc, char** argv) {
  const bool serial = argc > 1 && std::strcmp(argv[1], "--serial") == 0;
  int failed = 0;
  for (int id = 1; id <= mbep::kCriterionCount; ++id) {
    const auto r = mbep::run_criterion(id, serial ? mbep::Execution::serial : mbep::Execution::parallel);
    std::cout << mbep::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << mbep::kCriterionCount - failed << "/" << mbep::kCriterionCount
            << std::endl;
  return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
