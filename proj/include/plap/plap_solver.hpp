#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "plap/error.hpp"
#include "plap/geometry2d.hpp"
#include "plap/load.hpp"

namespace plap {

inline constexpr double kMinExponent = 1.1;
inline constexpr double kMaxExponent = 10.0;

struct SolveConfig {
  double p = 2.0;
  double eps_initial = 1e-1;
  double eps_final = 1e-8;
  double eps_factor = 0.1;
  double newton_tol = 1e-10;  // Euclidean norm of the nodal residual
  int max_newton_iters = 100;  // per continuation stage
  double line_search_shrink = 0.5;
  double armijo = 1e-4;

  /// Throws parameter_out_of_range on any violated invariant.
  void validate() const;
  /// Continuation schedule eps_initial, eps_initial*factor, ..., eps_final.
  std::vector<double> schedule() const;
};

/// FEM solution: P1 nodal values plus the per-cell average of the trace.
struct StateField {
  std::vector<double> nodal_values;
  std::vector<double> boundary_trace;
  double p = 2.0;
  double epsilon = 0.0;
};

struct StageReport {
  double epsilon = 0.0;
  int iterations = 0;
  int gradient_steps = 0;  // singular or non-descent Hessian fallbacks
  double residual_norm = 0.0;
  bool converged = false;
  std::vector<double> energy;  // one entry per accepted iterate, starting with the warm start
};

struct SolveReport {
  bool converged = false;
  double residual_norm = 0.0;
  std::vector<StageReport> stages;
  double J = 0.0;
  double I = 0.0;
  double duality_gap = 0.0;

  int total_iterations() const;
};

struct SolveResult {
  StateField state;
  SolveReport report;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, SolveReport report)
      : Error(ErrorCode::solver_nonconvergence, what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Discrete regularized energy
///   E(u) = (1/p) int_Omega (|grad u|^2 + eps^2)^{p/2} + |u|^p  -  int_dOmega f u
/// on P1 elements, together with its exact gradient and Hessian. The load
/// enters only through the vector b_i = int f phi_i, integrated exactly for
/// piecewise-constant loads with arbitrary breakpoints.
class PLaplaceProblem {
 public:
  PLaplaceProblem(const DomainMesh& mesh, const PiecewiseLoad& f, double p);
  PLaplaceProblem(const DomainMesh& mesh, const LoadField& f, double p);

  const DomainMesh& mesh() const { return *mesh_; }
  double p() const { return p_; }
  const Eigen::VectorXd& load_vector() const { return load_; }

  double energy(std::span<const double> u, double eps) const;
  Eigen::VectorXd residual(std::span<const double> u, double eps) const;
  Eigen::SparseMatrix<double> hessian(std::span<const double> u, double eps) const;

  /// int_dOmega f u (exact).
  double load_pairing(std::span<const double> u) const;

 private:
  void check(std::span<const double> u) const;

  const DomainMesh* mesh_;
  double p_;
  Eigen::VectorXd load_;
  std::vector<std::array<Point, 3>> grads_;  // basis gradients per triangle
};

/// b_i = int_dOmega f phi_i for a piecewise-constant boundary function.
Eigen::VectorXd assemble_load_vector(const DomainMesh& mesh, const PiecewiseLoad& f);

double energy(const DomainMesh& mesh, const StateField& u, const LoadField& f, double p, double eps);
Eigen::VectorXd residual(const DomainMesh& mesh, const StateField& u, const LoadField& f, double p,
                         double eps);

/// Newton with backtracking line search on each stage of the eps schedule.
/// Never throws on non-convergence; check report.converged or call
/// require_converged.
SolveResult solve(const DomainMesh& mesh, const PiecewiseLoad& f, const SolveConfig& config,
                  const std::vector<double>* initial_guess = nullptr);
SolveResult solve(const DomainMesh& mesh, const LoadField& f, const SolveConfig& config);

/// Throws SolverError (carrying the report) unless the solve converged.
const SolveResult& require_converged(const SolveResult& result, const std::string& context);

/// Builds a StateField (including the boundary trace) from nodal values.
StateField make_state(const DomainMesh& mesh, std::vector<double> nodal, double p, double eps);
std::vector<double> cell_trace(const DomainMesh& mesh, std::span<const double> nodal);

/// Trace of the P1 field at arclength s.
double trace_at(const DomainMesh& mesh, const ArclengthChart& chart, std::span<const double> nodal,
                double s);

/// J(f) = int_dOmega f u = sum_c f_c * trace_c * w_c.
double functional_J(const DomainMesh& mesh, const LoadField& f, const StateField& u);
double functional_J(const DomainMesh& mesh, const PiecewiseLoad& f, const StateField& u);

/// int_Omega |grad u|^p + |u|^p (no regularization).
double volume_term(const DomainMesh& mesh, std::span<const double> u, double p);

/// I(u) = (p * int f u - int |grad u|^p + |u|^p) / (p - 1).
double functional_I(const DomainMesh& mesh, const StateField& u, const LoadField& f, double p);
double functional_I(const DomainMesh& mesh, const StateField& u, const PiecewiseLoad& f, double p);

/// Discrete W^{1,p} distance (int |grad(u-v)|^p + |u-v|^p)^{1/p}.
double w1p_distance(const DomainMesh& mesh, std::span<const double> u, std::span<const double> v,
                    double p);

}  // namespace plap
