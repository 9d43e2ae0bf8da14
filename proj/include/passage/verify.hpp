#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace passage {

struct Criterion {
  int id;
  std::string name;
  std::string summary;
};

const std::vector<Criterion>& criteria();

struct VerifyOptions {
  std::uint64_t seed = 42;
  // "scale_grid" perturbs the tabulated W^(q) used by the Laplace check.
  std::string inject_fault;
  // Empty runs everything.
  std::vector<int> only;
  unsigned threads = 1;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  // Names of the individual checks that failed.
  std::vector<std::string> failures;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  // file name -> CSV contents; a pure function of the options.
  std::map<std::string, std::string> artifacts;
  bool all_passed() const;
};

// Runs the acceptance battery; progress lines go to log (may be null).
VerifyReport run_verify(const VerifyOptions& opt, std::ostream* log = nullptr);

void print_table(std::ostream& os, const VerifyReport& report);
void write_artifacts(const std::string& dir, const VerifyReport& report);

}  // namespace passage
