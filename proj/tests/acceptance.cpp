// Runs every acceptance criterion at its stated tolerance; one line each.
#include <iostream>

#include "passage/verify.hpp"

int main() {
  passage::VerifyOptions opt;
  const auto report = passage::run_verify(opt);
  for (const auto& r : report.results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << "  " << r.name;
    if (!r.passed) std::cout << "  [" << r.detail << "]";
    std::cout << '\n';
  }
  std::cout << (report.all_passed() ? "all criteria passed" : "some criteria failed") << '\n';
  return report.all_passed() ? 0 : 1;
}
