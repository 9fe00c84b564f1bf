#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "plap/geometry2d.hpp"
#include "plap/load.hpp"

namespace plap::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured quantities against their thresholds
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
};

const std::vector<Criterion>& criteria();

/// Runs the selected criteria (all when `ids` is empty). A criterion passes
/// when its checks hold and it finishes within its runtime budget. Progress
/// lines go to `log` when given.
std::vector<CriterionResult> run(const std::vector<int>& ids = {}, std::ostream* log = nullptr);

/// "[PASS] 3 radial-p3  <detail>  (1.2 s / 120 s)".
std::string format_line(const CriterionResult& r);

/// f = value on cells [first, first + count) (cyclically), 0 elsewhere.
LoadField step_load(const DomainMesh& mesh, std::size_t first, std::size_t count, double value = 1.0);

/// Load symmetric under the mesh reflection c -> n-1-c.
LoadField mirrored(const LoadField& f);

}  // namespace plap::acceptance
