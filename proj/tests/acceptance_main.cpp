// Acceptance matrix: one PASS/FAIL line per criterion; exit status 4 when any fails.
#include <iostream>
#include <string>
#include <vector>

#include "plap_verify/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));
  const auto results = plap::acceptance::run(ids, &std::cout);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 4;
}
