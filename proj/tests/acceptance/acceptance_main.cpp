// Runs every acceptance criterion at full Monte Carlo size and prints one
// PASS/FAIL line per criterion. Exit status is non-zero if any line fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "udn/cli/validate.hpp"

int main(int argc, char** argv) {
  udn::cli::ValidateOptions opts;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") opts.quick = true;
    else if (a.rfind("--seed=", 0) == 0) opts.seed = std::stoull(a.substr(7));
    else {
      std::cerr << "usage: udn_acceptance [--quick] [--seed=N]\n";
      return 2;
    }
  }
  opts.on_result = [](const udn::cli::CriterionResult& r) { std::cout << udn::cli::format_line(r) << std::endl; };
  const auto report = udn::cli::run_validation(opts);
  int failed = 0;
  for (const auto& r : report.results) failed += r.pass ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
