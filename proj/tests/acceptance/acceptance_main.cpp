// Acceptance criteria 1-13; one PASS/FAIL line each. Tolerances and runtime
// budgets are pinned in the library (experiments.hpp, acceptance.cpp).

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "philab/acceptance.hpp"

int main(int argc, char** argv) {
  philab::AcceptanceOptions opts;
  opts.out_dir = "acceptance_out";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0) opts.out_dir = argv[i + 1];
  }
  opts.on_result = [](const philab::CriterionResult& r) {
    std::cout << philab::format_criterion(r) << std::endl;
  };
  try {
    const auto results = philab::run_acceptance(opts);
    int failed = 0;
    for (const auto& r : results) failed += r.pass() ? 0 : 1;
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << '\n';
    return 2;
  }
}
