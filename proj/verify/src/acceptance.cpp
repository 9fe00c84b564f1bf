#include "plap_verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "plap/optimizer.hpp"
#include "plap/perturbation.hpp"
#include "plap/plap_solver.hpp"
#include "plap/rearrangement.hpp"
#include "plap_verify/oracles.hpp"

namespace plap::acceptance {

LoadField step_load(const DomainMesh& mesh, std::size_t first, std::size_t count, double value) {
  const std::size_t n = mesh.num_boundary_cells();
  std::vector<double> v(n, 0.0);
  for (std::size_t k = 0; k < count; ++k) v[(first + k) % n] = value;
  return make_load(mesh, std::move(v));
}

LoadField mirrored(const LoadField& f) {
  LoadField g = f;
  const std::size_t n = f.size();
  for (std::size_t c = 0; c < n / 2; ++c) g.values[n - 1 - c] = f.values[c];
  return g;
}

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fix(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

DomainMesh disk(int n) { return build_disk_mesh(1.0, n, default_radial_count(n)); }

SolveConfig solve_config(double p) {
  SolveConfig c;
  c.p = p;
  return c;
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  void check(bool ok) { passed = passed && ok; }
};

// 1. Duality J = I at the discrete optimum.
void duality(Outcome& out) {
  const DomainMesh mesh = build_disk_mesh(1.0, 64, 10);
  const std::size_t n = mesh.num_boundary_cells();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> high(0.5, 2.0), low(-0.5, 0.5);
  std::uniform_int_distribution<std::size_t> start(0, n - 1), length(n / 8, n / 2);
  double worst = 0.0;
  bool all_converged = true;
  for (double p : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 5; ++k) {
      const std::size_t first = start(rng);
      const std::size_t count = length(rng);
      const double hi = high(rng);
      const double lo = low(rng);
      LoadField f = step_load(mesh, first, count, hi - lo);
      for (double& v : f.values) v += lo;
      const SolveResult r = solve(mesh, f, solve_config(p));
      all_converged = all_converged && r.report.converged;
      worst = std::max(worst, r.report.duality_gap / (1.0 + std::abs(r.report.J)));
    }
  }
  out.check(all_converged && worst <= 1e-6);
  out.detail << "max |J-I|/(1+|J|) = " << sci(worst) << " (<= 1e-6), 15 solves"
             << (all_converged ? "" : ", NOT all converged");
}

// 2. p = 2, f = 1 against the Bessel solution.
void linear_oracle(Outcome& out) {
  const double exact = oracle::linear_disk_J(1.0);
  double err[2];
  int k = 0;
  for (int n : {64, 128}) {
    const DomainMesh mesh = disk(n);
    const SolveResult r = solve(mesh, constant_load(mesh, 1.0), solve_config(2.0));
    out.check(r.report.converged);
    err[k++] = std::abs(r.report.J - exact) / exact;
  }
  const double order = std::log2(err[0] / err[1]);
  out.check(err[0] <= 1e-2 && order >= 1.8);
  out.detail << "J oracle " << fix(exact, 6) << ", rel err 64: " << sci(err[0]) << " (<= 1e-2), 128: "
             << sci(err[1]) << ", order " << fix(order, 3) << " (>= 1.8)";
}

// 3. p = 3, f = 1 against radial shooting.
void radial_oracle(Outcome& out) {
  const auto ref = oracle::radial_shooting(3.0, 1.0, 1.0);
  const DomainMesh mesh = disk(64);
  const SolveResult r = solve(mesh, constant_load(mesh, 1.0), solve_config(3.0));
  out.check(r.report.converged);
  double worst = 0.0;
  for (double t : r.state.boundary_trace) {
    worst = std::max(worst, std::abs(t - ref.boundary_value) / ref.boundary_value);
  }
  out.check(worst <= 1e-2);
  out.detail << "u(R) oracle " << fix(ref.boundary_value, 6) << ", max rel trace err " << sci(worst)
             << " (<= 1e-2)";
}

// 4. Best response against exhaustive enumeration.
void best_response_exact(Outcome& out) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> level(0, 2);
  int failures = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + static_cast<std::size_t>(k % 6);
    std::vector<double> values(n), trace(n);
    for (std::size_t c = 0; c < n; ++c) {
      values[c] = k % 2 == 0 ? static_cast<double>(level(rng)) : unit(rng);
      trace[c] = unit(rng);
    }
    const LoadField f0(values, 0.25);
    const LoadField br = best_response(RearrangementClass::of(f0), trace);
    const double l_br = linear_functional_L(br, trace);
    const double l_max = oracle::exhaustive_max_L(values, trace, 0.25);
    const double gap = std::abs(l_max - l_br) / (1.0 + std::abs(l_max));
    worst = std::max(worst, gap);
    if (!same_class(br, f0) || gap > 1e-14) ++failures;
  }
  out.check(failures == 0);
  out.detail << failures << "/100 mismatches, max rel gap " << sci(worst) << " (<= 1e-14)";
}

struct OptimizeCase {
  std::string label;
  double p;
  OptimizeResult result;
  LoadField f0;
  std::optional<double> exhaustive;
};

// Optimization runs shared by criteria 5 and 6.
const std::vector<OptimizeCase>& optimize_cases() {
  static const std::vector<OptimizeCase> cases = [] {
    std::vector<OptimizeCase> out;
    const DomainMesh mesh = disk(64);
    const LoadField binary = step_load(mesh, 0, 16);
    LoadField three = step_load(mesh, 0, 24);
    for (std::size_t c = 0; c < 8; ++c) three.values[c] = 2.0;
    const DomainMesh tiny = build_disk_mesh(1.0, 8, 2);
    const LoadField tiny3 = make_load(tiny, {0, 0, 0, 1, 1, 1, 2, 2});
    for (double p : {2.0, 3.0}) {
      OptimizeConfig cfg;
      cfg.n_restarts = 5;
      cfg.seed = 2026;
      cfg.solve.p = p;
      out.push_back({"binary", p, maximize_over_rearrangements(mesh, binary, cfg), binary, std::nullopt});
      out.push_back({"3-level", p, maximize_over_rearrangements(mesh, three, cfg), three, std::nullopt});
      out.push_back({"tiny 3-level", p, maximize_over_rearrangements(tiny, tiny3, cfg), tiny3,
                     oracle::exhaustive_max_J(tiny, tiny3, cfg.solve).J});
    }
    return out;
  }();
  return cases;
}

// 5. J never drops along an optimization run.
void monotone_ascent(Outcome& out) {
  double worst = 0.0;  // largest drop relative to 1 + |J|
  std::size_t steps = 0;
  for (const auto& c : optimize_cases()) {
    for (const auto& r : c.result.restarts) {
      const auto& rec = r.history.records;
      for (std::size_t k = 1; k < rec.size(); ++k) {
        worst = std::max(worst, (rec[k - 1].J - rec[k].J) / (1.0 + std::abs(rec[k - 1].J)));
        ++steps;
      }
    }
  }
  out.check(worst <= 1e-5);
  out.detail << steps << " steps, max relative drop " << sci(std::max(worst, 0.0)) << " (<= 1e-5)";
}

// 6. Terminal iterates are comonotone; tiny case matches exhaustive search.
void comonotone_fixed_point(Outcome& out) {
  double worst_defect = 0.0;
  int not_fixed = 0;
  int class_violations = 0;
  for (const auto& c : optimize_cases()) {
    for (const auto& r : c.result.restarts) {
      worst_defect = std::max(worst_defect, r.defect);
      if (r.stop != StopReason::fixed_point) ++not_fixed;
      if (!same_class(r.final_load, c.f0)) ++class_violations;
    }
    if (c.exhaustive) {
      const double rel = std::abs(*c.exhaustive - c.result.eval.J) / std::abs(*c.exhaustive);
      out.check(rel <= 1e-6);
      out.detail << c.label << " p=" << fix(c.p, 0) << " |J-Jmax|/Jmax " << sci(rel) << " (<= 1e-6); ";
    }
  }
  out.check(worst_defect == 0.0 && not_fixed == 0 && class_violations == 0);
  out.detail << "max terminal defect " << sci(worst_defect) << " (= 0), " << not_fixed
             << " restarts not at a fixed point, " << class_violations << " class violations";
}

std::vector<TangentField> derivative_fields(double L) {
  return {TangentField::sine(1, L), TangentField::cosine(2, L), TangentField::bump(0.25 * L, 0.7, L)};
}

// 7. Four estimates of I'(0) agree and improve under refinement.
void derivative_agreement(Outcome& out) {
  std::map<std::pair<double, std::size_t>, double> coarse;  // (p, field index)
  double worst_fine = 0.0;
  int not_decreasing = 0;
  for (int n : {64, 128}) {
    const DomainMesh mesh = disk(n);
    const LoadField f = step_load(mesh, 0, static_cast<std::size_t>(n / 4));
    for (double p : {1.5, 2.0, 3.0}) {
      const auto fields = derivative_fields(mesh.total_boundary_length());
      for (std::size_t i = 0; i < fields.size(); ++i) {
        DerivativeConfig cfg;
        cfg.solve.p = p;
        const double d = derivative_report(mesh, f, fields[i], cfg).max_discrepancy();
        const auto key = std::make_pair(p, i);
        if (n == 64) {
          coarse[key] = d;
        } else {
          worst_fine = std::max(worst_fine, d);
          if (!(d < coarse[key])) ++not_decreasing;
        }
      }
    }
  }
  double worst_coarse = 0.0;
  for (const auto& [k, d] : coarse) worst_coarse = std::max(worst_coarse, d);
  out.check(worst_fine <= 1e-2 && not_decreasing == 0);
  out.detail << "max pairwise rel discrepancy 64: " << sci(worst_coarse) << ", 128: " << sci(worst_fine)
             << " (<= 1e-2); " << not_decreasing << "/9 cases not decreasing";
}

// 8. Rigid rotation of a mirror-symmetric load on the disk.
void symmetry_null(Outcome& out) {
  const DomainMesh mesh = disk(64);
  const std::size_t n = mesh.num_boundary_cells();
  LoadField two_level = mirrored(step_load(mesh, 0, n / 4, 0.5));
  for (std::size_t c = 0; c < n / 8; ++c) two_level.values[c] = two_level.values[n - 1 - c] = 1.0;
  const LoadField loads[] = {mirrored(step_load(mesh, 0, n / 8)), two_level};
  const TangentField v = TangentField::constant(1.0, mesh.total_boundary_length());
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    for (const auto& f : loads) {
      DerivativeConfig cfg;
      cfg.solve.p = p;
      const DerivativeReport r = derivative_report(mesh, f, v, cfg);
      worst = std::max(worst, r.max_abs_estimate() / (1.0 + std::abs(r.J)));
    }
  }
  out.check(worst <= 1e-4);
  out.detail << "max |I'(0)|/(1+|J|) over 4 estimates " << sci(worst) << " (<= 1e-4)";
}

// 9. Transported loads and states converge as t -> 0.
void transport_convergence(Outcome& out) {
  const DomainMesh mesh = disk(64);
  const double L = mesh.total_boundary_length();
  const PiecewiseLoad f = PiecewiseLoad::from_cells(mesh, step_load(mesh, 0, 16));
  const TangentField v = TangentField::sine(1, L) + TangentField::cosine(1, L);
  std::vector<double> ts;
  for (int k = 0; k <= 5; ++k) ts.push_back(0.1 * std::ldexp(1.0, -k));
  int violations = 0;
  for (double p : {2.0, 3.0}) {
    const auto samples = transported_solution_check(mesh, f, v, ts, solve_config(p));
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (!(samples[k].load_distance > 0.0 && samples[k].state_distance > 0.0)) ++violations;
      if (k > 0) {
        if (samples[k].load_distance > 1.1 * samples[k - 1].load_distance) ++violations;
        if (samples[k].state_distance > 1.1 * samples[k - 1].state_distance) ++violations;
      }
    }
    out.detail << "p=" << fix(p, 0) << " load " << sci(samples.front().load_distance) << " -> "
               << sci(samples.back().load_distance) << ", state " << sci(samples.front().state_distance)
               << " -> " << sci(samples.back().state_distance) << "; ";
  }
  out.check(violations == 0);
  out.detail << violations << " monotonicity violations (10% slack)";
}

// 10. Flow group property, first-order expansion and Jacobian.
void flow_fidelity(Outcome& out) {
  const double L = 2.0 * 3.14159265358979323846;
  const std::vector<TangentField> fields = {TangentField::sine(1, L), TangentField::cosine(2, L),
                                            TangentField::bump(1.0, 0.8, L),
                                            TangentField::sine(1, L) + TangentField::cosine(3, L, 0.5)};
  std::vector<double> points;
  for (int k = 0; k < 16; ++k) points.push_back(L * (k + 0.3) / 16.0);
  double group = 0.0;
  double worst_order_x = 1e9;
  double worst_order_j = 1e9;
  for (const auto& v : fields) {
    for (auto [t, s] : {std::pair{0.3, 0.2}, {-0.25, 0.4}, {0.1, -0.35}}) {
      const BoundaryFlow a(v, t), b(v, s), ab(v, t + s);
      for (double x : points) group = std::max(group, std::abs(a.forward(b.forward(x)) - ab.forward(x)));
    }
    double prev_x = 0.0;
    double prev_j = 0.0;
    for (double t : {0.1, 0.05, 0.025}) {
      double dx = 0.0;
      double dj = 0.0;
      const BoundaryFlow flow(v, t);
      for (double x : points) {
        dx = std::max(dx, std::abs(flow.forward(x) - x - t * v.value(x)));
        dj = std::max(dj, std::abs(flow.jacobian(x) - 1.0 - t * v.derivative(x)));
      }
      if (prev_x > 0.0) {
        worst_order_x = std::min(worst_order_x, std::log2(prev_x / dx));
        worst_order_j = std::min(worst_order_j, std::log2(prev_j / dj));
      }
      prev_x = dx;
      prev_j = dj;
    }
  }
  out.check(group <= 1e-9 && worst_order_x >= 1.8 && worst_order_j >= 1.8);
  out.detail << "group error " << sci(group) << " (<= 1e-9), expansion order " << fix(worst_order_x)
             << ", Jacobian order " << fix(worst_order_j) << " (>= 1.8)";
}

using Runner = std::function<void(Outcome&)>;

const std::map<int, Runner>& runners() {
  static const std::map<int, Runner> r = {
      {1, duality},         {2, linear_oracle},         {3, radial_oracle},
      {4, best_response_exact}, {5, monotone_ascent},   {6, comonotone_fixed_point},
      {7, derivative_agreement}, {8, symmetry_null},    {9, transport_convergence},
      {10, flow_fidelity},
  };
  return r;
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {1, "duality", 120},        {2, "linear-oracle", 60},     {3, "radial-p3", 120},
      {4, "best-response", 10},   {5, "monotone-ascent", 600},  {6, "comonotone-fixed-point", 600},
      {7, "derivative-agreement", 600}, {8, "symmetry-null", 120}, {9, "transport-convergence", 180},
      {10, "flow-fidelity", 30},
  };
  return c;
}

std::vector<CriterionResult> run(const std::vector<int>& ids, std::ostream* log) {
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.budget_seconds = c.budget_seconds;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      runners().at(c.id)(out);
    } catch (const std::exception& e) {
      out.passed = false;
      out.detail << "error: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = out.passed && r.seconds <= r.budget_seconds;
    r.detail = out.detail.str();
    if (r.seconds > r.budget_seconds) r.detail += "; over runtime budget";
    if (log) *log << format_line(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] %2d %-24s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
  return std::string(head) + " " + r.detail + "  (" + fix(r.seconds, 1) + " s / " + fix(r.budget_seconds, 0) +
         " s)";
}

}  // namespace plap::acceptance
