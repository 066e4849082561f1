#pragma once

#include <functional>
#include <string>
#include <vector>

namespace invsq {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance criteria (all when ids is empty), calling on_result
// as each finishes. A criterion that throws is recorded as failed.
std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result = nullptr,
                                            const std::vector<int>& ids = {});

}  // namespace invsq
