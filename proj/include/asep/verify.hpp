#pragma once

#include <functional>
#include <string>
#include <vector>

namespace asep {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;  // measured gap (or runtime in seconds)
  double tol = 0.0;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
};

// Acceptance criteria 1..8. tol_scale multiplies every numeric tolerance
// (runtime limits are not scaled).
CriterionResult run_criterion(int id, double tol_scale = 1.0);

// identities -> 5; moments -> 1-4; laplace -> 6; bose -> 7; airy -> 8; all -> 1-8.
std::vector<int> suite_criteria(const std::string& suite);

}  // namespace asep
