#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pfc {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  std::vector<int> only;  // empty: every criterion
};

constexpr int kAcceptanceCriteria = 8;

const char* acceptance_title(int id);

/// Run one criterion (1..8). Never throws for simulation failures; those
/// are reported as a failed result with the reason in detail.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

/// Run the selected criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 title: detail"
std::string format_result_line(const CriterionResult& r);

}  // namespace pfc
