#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vmoidx/roots.hpp"

namespace vmoidx {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  RootSearchOptions roots;
  std::uint64_t seed = 1;
  std::vector<int> only;  // empty: all criteria
};

inline constexpr int kCriterionCount = 11;

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS  3 gauss-bonnet: ... (0.41 s)"
std::string format_criterion(const CriterionResult& r);

}  // namespace vmoidx
