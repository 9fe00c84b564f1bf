#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plap/plap_solver.hpp"
#include "plap/rearrangement.hpp"

namespace plap {

struct OptimizeConfig {
  int max_outer_iters = 100;
  double J_tol = 1e-12;  // relative improvement below which a restart stops
  int n_restarts = 0;  // random starts in addition to f0 itself
  std::uint64_t seed = 0;
  // Neighbours (shifts, reflections, exchanges) tried at each best-response
  // fixed point. 0 disables the neighbour search.
  int neighbour_budget = 256;
  SolveConfig solve;

  /// Throws parameter_out_of_range on violated invariants.
  void validate() const;
};

struct Evaluation {
  double J = 0.0;
  double gap = 0.0;
  double defect = 0.0;
  std::size_t ties = 0;
};

enum class Move { start, best_response, neighbour };
std::string move_name(Move m);

struct IterationRecord {
  int iter = 0;
  Move move = Move::start;
  double J = 0.0;
  double gap = 0.0;
  double defect = 0.0;
  bool permutation_changed = false;
  std::size_t ties = 0;
};

enum class StopReason { singleton, fixed_point, cycle, j_tol, max_iters };
std::string stop_reason_name(StopReason r);

struct OptimizeHistory {
  std::vector<IterationRecord> records;
};

struct RestartOutcome {
  int index = 0;  // 0 starts from f0, r >= 1 from a random permutation
  LoadField initial;
  LoadField final_load;
  double J = 0.0;
  double defect = 0.0;
  StopReason stop = StopReason::max_iters;
  OptimizeHistory history;
};

struct OptimizeResult {
  LoadField f_hat;
  StateField u_hat;
  Evaluation eval;
  std::size_t best_restart = 0;
  std::vector<RestartOutcome> restarts;

  const OptimizeHistory& history() const { return restarts[best_restart].history; }
};

/// One solve of f plus its functionals; throws SolverError on non-convergence.
Evaluation evaluate_candidate(const DomainMesh& mesh, const LoadField& f, const SolveConfig& config,
                              StateField* state = nullptr);

/// Random member of the rearrangement class of f0, a pure function of
/// (seed, restart index).
LoadField random_rearrangement(const LoadField& f0, std::uint64_t seed, int restart);

/// Best-response ascent over the rearrangement class of f0, from f0 and from
/// n_restarts random permutations. At a fixed point of the best response, a
/// bounded neighbour search (shifts, reflections, exchanges) looks for a
/// strictly better member and resumes the ascent from it. Restarts run concurrently. Returns the best
/// final iterate by J; every restart outcome is reported.
OptimizeResult maximize_over_rearrangements(const DomainMesh& mesh, const LoadField& f0,
                                            const OptimizeConfig& config);

}  // namespace plap
