#pragma once

#include <cstdint>
#include <vector>

#include "plap/plap_solver.hpp"

// Reference values computed independently of the finite element code.
namespace plap::oracle {

/// p = 2, f = 1 on the disk of radius R: u = I0(r) / I1(R), so the trace is
/// I0(R)/I1(R) and J = 2 pi R I0(R)/I1(R).
double linear_disk_trace(double radius);
double linear_disk_J(double radius);

/// Radial solution of div(|u'|^{p-2} u') = |u|^{p-2} u on the disk with
/// |u'|^{p-2} u'(R) = flux, by RK4 shooting on u(0) with bisection.
struct RadialProfile {
  double center_value = 0.0;
  double boundary_value = 0.0;
  double J = 0.0;  // 2 pi R flux u(R)
};
RadialProfile radial_shooting(double p, double radius, double flux, int steps = 20000);

/// max over all permutations of values of sum_c values[c] * trace[c] * weight.
double exhaustive_max_L(std::vector<double> values, const std::vector<double>& trace, double weight);

/// max of J over every distinct rearrangement of f0.
struct ExhaustiveResult {
  double J = 0.0;
  LoadField argmax;
  std::size_t count = 0;
};
ExhaustiveResult exhaustive_max_J(const DomainMesh& mesh, const LoadField& f0, const SolveConfig& config);

/// max of J over `samples` uniformly random permutations of f0.
double random_sampling_max_J(const DomainMesh& mesh, const LoadField& f0, const SolveConfig& config,
                             int samples, std::uint64_t seed);

}  // namespace plap::oracle
