#pragma once

#include <string>
#include <vector>

namespace isokernel {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  /// Criterion 11: re-run criteria 1-10 and the CLI examples, compare bytes.
  bool determinism = true;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "criterion  3 PASS  name: detail"
std::string format_result(const CriterionResult& r);

}  // namespace isokernel
