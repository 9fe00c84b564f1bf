#include "plap/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <thread>

namespace plap {

void OptimizeConfig::validate() const {
  if (max_outer_iters < 1) throw Error(ErrorCode::parameter_out_of_range, "max_outer_iters must be >= 1");
  if (!(J_tol > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "J_tol must be positive");
  if (neighbour_budget < 0) throw Error(ErrorCode::parameter_out_of_range, "neighbour_budget must be >= 0");
  if (n_restarts < 0) throw Error(ErrorCode::parameter_out_of_range, "n_restarts must be >= 0");
  solve.validate();
}

std::string move_name(Move m) {
  switch (m) {
    case Move::start: return "start";
    case Move::best_response: return "best_response";
    case Move::neighbour: return "neighbour";
  }
  return "unknown";
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::singleton: return "singleton";
    case StopReason::fixed_point: return "fixed_point";
    case StopReason::cycle: return "cycle";
    case StopReason::j_tol: return "j_tol";
    case StopReason::max_iters: return "max_iters";
  }
  return "unknown";
}

Evaluation evaluate_candidate(const DomainMesh& mesh, const LoadField& f, const SolveConfig& config,
                              StateField* state) {
  const SolveResult r = solve(mesh, f, config);
  require_converged(r, "candidate evaluation");
  Evaluation e;
  e.J = r.report.J;
  e.gap = r.report.duality_gap;
  e.defect = comonotonicity_defect(f, r.state.boundary_trace);
  e.ties = count_trace_ties(r.state.boundary_trace);
  if (state) *state = r.state;
  return e;
}

LoadField random_rearrangement(const LoadField& f0, std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  LoadField f = f0;
  // Fisher-Yates with an explicit index draw, so the result does not depend on
  // the standard library's shuffle.
  for (std::size_t i = f.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(f.values[i - 1], f.values[j]);
  }
  return f;
}

namespace {

struct RestartRun {
  RestartOutcome outcome;
  StateField state;
  Evaluation eval;
};

// Neighbours of f tried at a best-response fixed point: cyclic shifts (the
// discrete boundary translations, equal-arclength cells), reflections, then
// single exchanges ordered by the first-order loss (f_i - f_j)(t_i - t_j) w,
// which is nonnegative at a comonotone point. At most `budget` members.
std::vector<LoadField> neighbour_candidates(const LoadField& f, std::span<const double> trace, int budget) {
  const std::size_t n = f.size();
  const auto cap = static_cast<std::size_t>(budget);
  std::vector<LoadField> out;
  auto push = [&](LoadField g) {
    if (out.size() < cap && g != f) out.push_back(std::move(g));
  };
  auto shifted = [&](std::size_t shift, bool reflect) {
    LoadField g = f;
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t src = reflect ? (shift + n - c) % n : (c + shift) % n;
      g.values[c] = f.values[src];
    }
    return g;
  };
  for (std::size_t d = 1; d <= n / 2; ++d) {
    push(shifted(d, false));
    if (n - d != d) push(shifted(n - d, false));
  }
  for (std::size_t r = 0; r < n; ++r) push(shifted(r, true));

  struct Pair {
    double loss;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (f.values[i] == f.values[j]) continue;
      pairs.push_back({(f.values[i] - f.values[j]) * (trace[i] - trace[j]) * f.weight, i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.loss < b.loss; });
  for (const auto& pr : pairs) {
    if (out.size() >= cap) break;
    LoadField g = f;
    std::swap(g.values[pr.i], g.values[pr.j]);
    push(std::move(g));
  }
  return out;
}

RestartRun run_restart(const DomainMesh& mesh, const RearrangementClass& cls, LoadField start, int index,
                       const OptimizeConfig& config) {
  RestartRun run;
  run.outcome.index = index;
  run.outcome.initial = start;
  auto& records = run.outcome.history.records;

  auto evaluate = [&](const LoadField& f, int iter, StateField& st) {
    try {
      return evaluate_candidate(mesh, f, config.solve, &st);
    } catch (const SolverError& e) {
      throw SolverError("restart " + std::to_string(index) + ", iteration " + std::to_string(iter) + ": " +
                            e.what(),
                        e.report());
    }
  };

  LoadField f = std::move(start);
  StateField st;
  Evaluation ev = evaluate(f, 0, st);
  records.push_back({0, Move::start, ev.J, ev.gap, ev.defect, false, ev.ties});
  std::vector<LoadField> seen{f};
  auto was_seen = [&seen](const LoadField& g) { return std::find(seen.begin(), seen.end(), g) != seen.end(); };

  StopReason stop = StopReason::max_iters;
  if (cls.is_singleton()) {
    stop = StopReason::singleton;
  } else {
    int k = 1;
    while (k <= config.max_outer_iters) {
      LoadField next = best_response(cls, st.boundary_trace);
      if (next == f) {
        // Discrete fixed point; look for a strictly better neighbour.
        bool moved = false;
        for (auto& g : neighbour_candidates(f, st.boundary_trace, config.neighbour_budget)) {
          if (was_seen(g)) continue;
          StateField g_state;
          const Evaluation g_ev = evaluate(g, k, g_state);
          seen.push_back(g);
          if (g_ev.J - ev.J > config.J_tol * (1.0 + std::abs(ev.J))) {
            records.push_back({k, Move::neighbour, g_ev.J, g_ev.gap, g_ev.defect, true, g_ev.ties});
            f = std::move(g);
            st = std::move(g_state);
            ev = g_ev;
            moved = true;
            break;
          }
        }
        if (!moved) {
          stop = StopReason::fixed_point;
          break;
        }
        ++k;
        continue;
      }
      const bool revisit = was_seen(next);
      StateField next_state;
      const Evaluation next_ev = evaluate(next, k, next_state);
      records.push_back({k, Move::best_response, next_ev.J, next_ev.gap, next_ev.defect, true, next_ev.ties});
      const double gain = next_ev.J - ev.J;
      if (next_ev.J >= ev.J) {
        f = std::move(next);
        st = std::move(next_state);
        ev = next_ev;
      }
      if (revisit) {
        stop = StopReason::cycle;
        break;
      }
      seen.push_back(f);
      if (gain < config.J_tol * (1.0 + std::abs(ev.J))) {
        stop = StopReason::j_tol;
        break;
      }
      ++k;
    }
  }
  run.outcome.final_load = f;
  run.outcome.J = ev.J;
  run.outcome.defect = ev.defect;
  run.outcome.stop = stop;
  run.state = std::move(st);
  run.eval = ev;
  return run;
}

}  // namespace

OptimizeResult maximize_over_rearrangements(const DomainMesh& mesh, const LoadField& f0,
                                            const OptimizeConfig& config) {
  config.validate();
  check_same_mesh(mesh, f0);
  const RearrangementClass cls = RearrangementClass::of(f0);
  const int total = cls.is_singleton() ? 1 : 1 + config.n_restarts;

  std::vector<LoadField> starts;
  starts.push_back(f0);
  for (int r = 1; r < total; ++r) starts.push_back(random_rearrangement(f0, config.seed, r));

  std::vector<RestartRun> runs(static_cast<std::size_t>(total));
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), total));
  if (workers == 1) {
    for (int r = 0; r < total; ++r) runs[r] = run_restart(mesh, cls, starts[r], r, config);
  } else {
    // Static round-robin over workers; results land in restart order.
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (int r = static_cast<int>(w); r < total; r += static_cast<int>(workers)) {
          runs[r] = run_restart(mesh, cls, starts[r], r, config);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }

  OptimizeResult out;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].eval.J > runs[out.best_restart].eval.J) out.best_restart = r;
  }
  out.f_hat = runs[out.best_restart].outcome.final_load;
  out.u_hat = runs[out.best_restart].state;
  out.eval = runs[out.best_restart].eval;
  for (auto& run : runs) out.restarts.push_back(std::move(run.outcome));
  return out;
}

}  // namespace plap
