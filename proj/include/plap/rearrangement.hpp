#pragma once

#include <span>
#include <vector>

#include "plap/load.hpp"

namespace plap {

/// Tie tolerance for comonotonicity counting.
inline constexpr double kTieTol = 1e-12;

/// Rearrangement class of f0 on equal-weight cells: the ascending multiset of
/// its values. Members are exactly the permutations of those values.
struct RearrangementClass {
  std::vector<double> sorted_values;
  double common_weight = 1.0;

  static RearrangementClass of(const LoadField& f0);
  std::size_t size() const { return sorted_values.size(); }
  bool contains(const LoadField& f, double tol = 0.0) const;
  /// True when every member equals f0 (all values equal).
  bool is_singleton() const;
};

std::vector<double> distribution(const LoadField& f);

/// Sorted values agree elementwise within tol. Throws mesh_mismatch when the
/// fields have different lengths.
bool same_class(const LoadField& f, const LoadField& g, double tol = 0.0);

/// Comonotone best response: cells ordered by trace (stable in cell index)
/// receive the class values in ascending order. Maximizes
/// sum_c f_c * trace_c * w over the class.
LoadField best_response(const RearrangementClass& cls, std::span<const double> trace);

/// L(f) = sum_c f_c * trace_c * w_c.
double linear_functional_L(const LoadField& f, std::span<const double> trace);

/// Fraction of cell pairs ordered oppositely by f and trace (beyond kTieTol).
/// Zero iff f = phi(trace) for a nondecreasing phi, up to ties.
double comonotonicity_defect(const LoadField& f, std::span<const double> trace, double tie_tol = kTieTol);

/// Number of adjacent pairs in the sorted trace closer than tie_tol.
std::size_t count_trace_ties(std::span<const double> trace, double tie_tol = kTieTol);

}  // namespace plap
