// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <iostream>

#include "hamel/validation.hpp"

int main() {
  int failures = 0;
  for (const auto& check : hamel::validation::acceptance_checks()) {
    const auto r = hamel::validation::run_check(check);
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.id << "  " << r.name << "  | " << r.detail
              << std::endl;
    if (!r.passed) ++failures;
  }
  std::cout << (failures == 0 ? "acceptance: all criteria passed"
                              : "acceptance: " + std::to_string(failures) + " criterion(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
