#include "plap/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "plap/error.hpp"

namespace plap {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::mesh_mismatch, std::string(what) + ": lengths " + std::to_string(a) +
                                              " and " + std::to_string(b) + " differ");
  }
}

}  // namespace

std::vector<double> distribution(const LoadField& f) {
  std::vector<double> v = f.values;
  std::sort(v.begin(), v.end());
  return v;
}

RearrangementClass RearrangementClass::of(const LoadField& f0) {
  return RearrangementClass{distribution(f0), f0.weight};
}

bool RearrangementClass::contains(const LoadField& f, double tol) const {
  if (f.size() != size()) return false;
  const auto d = distribution(f);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::abs(d[i] - sorted_values[i]) > tol) return false;
  }
  return true;
}

bool RearrangementClass::is_singleton() const {
  return sorted_values.empty() || sorted_values.front() == sorted_values.back();
}

bool same_class(const LoadField& f, const LoadField& g, double tol) {
  require_same_length(f.size(), g.size(), "same_class");
  return RearrangementClass::of(f).contains(g, tol);
}

LoadField best_response(const RearrangementClass& cls, std::span<const double> trace) {
  require_same_length(cls.size(), trace.size(), "best_response");
  std::vector<std::size_t> order(trace.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&trace](std::size_t a, std::size_t b) { return trace[a] < trace[b]; });
  std::vector<double> values(trace.size());
  for (std::size_t k = 0; k < order.size(); ++k) values[order[k]] = cls.sorted_values[k];
  return LoadField(std::move(values), cls.common_weight);
}

double linear_functional_L(const LoadField& f, std::span<const double> trace) {
  require_same_length(f.size(), trace.size(), "linear_functional_L");
  double acc = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) acc += f.values[c] * trace[c];
  return acc * f.weight;
}

double comonotonicity_defect(const LoadField& f, std::span<const double> trace, double tie_tol) {
  require_same_length(f.size(), trace.size(), "comonotonicity_defect");
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double du = trace[j] - trace[i];
      const double df = f.values[j] - f.values[i];
      if ((du > tie_tol && df < -tie_tol) || (du < -tie_tol && df > tie_tol)) ++bad;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(bad) / pairs;
}

std::size_t count_trace_ties(std::span<const double> trace, double tie_tol) {
  std::vector<double> s(trace.begin(), trace.end());
  std::sort(s.begin(), s.end());
  std::size_t ties = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] - s[k - 1] <= tie_tol) ++ties;
  }
  return ties;
}

}  // namespace plap
