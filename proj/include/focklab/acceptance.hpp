#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace focklab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 14;

// Runs one acceptance criterion (1..14).
CriterionResult run_criterion(int id);

// Named groups: "algebra", "traces", "index", "kernels", "all".
std::vector<int> suite_criteria(const std::string& suite);

nlohmann::json to_json(const CriterionResult& r);

}  // namespace focklab::acceptance
