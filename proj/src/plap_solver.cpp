#include "plap/plap_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "plap/quadrature.hpp"

namespace plap {

namespace {

// Floors keep the Hessian finite where the singular (p < 2) weights blow up.
// They never enter the energy or the residual.
constexpr double kGradFloor = 1e-30;
constexpr double kValueFloor = 1e-12;
// Relative size of energy differences that rounding can produce.
constexpr double kEnergyNoise = 1e-11;
constexpr double kMinStep = 1e-12;

double pow_abs(double x, double e) { return std::pow(std::abs(x), e); }

}  // namespace

void SolveConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::parameter_out_of_range, msg); };
  if (!(p >= kMinExponent && p <= kMaxExponent)) {
    std::ostringstream os;
    os << "p = " << p << " outside [" << kMinExponent << ", " << kMaxExponent << "]";
    fail(os.str());
  }
  if (!(eps_final > 0.0) || !(eps_initial >= eps_final)) fail("need 0 < eps_final <= eps_initial");
  if (!(eps_factor > 0.0 && eps_factor < 1.0)) fail("need 0 < eps_factor < 1");
  if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
  if (max_newton_iters < 1) fail("max_newton_iters must be >= 1");
  if (!(line_search_shrink > 0.0 && line_search_shrink < 1.0)) fail("need 0 < line_search_shrink < 1");
  if (!(armijo > 0.0 && armijo < 0.5)) fail("need 0 < armijo < 0.5");
}

std::vector<double> SolveConfig::schedule() const {
  std::vector<double> eps;
  double e = eps_initial;
  while (e > eps_final * (1.0 + 1e-12)) {
    eps.push_back(e);
    e *= eps_factor;
  }
  eps.push_back(eps_final);
  return eps;
}

int SolveReport::total_iterations() const {
  int n = 0;
  for (const auto& s : stages) n += s.iterations;
  return n;
}

Eigen::VectorXd assemble_load_vector(const DomainMesh& mesh, const PiecewiseLoad& f) {
  const ArclengthChart chart(mesh);
  const double L = chart.length();
  if (std::abs(f.period() - L) > 1e-9 * L) {
    throw Error(ErrorCode::mesh_mismatch, "load period does not match the boundary length");
  }
  std::vector<double> pts;
  pts.reserve(mesh.num_boundary_cells() + f.num_pieces() + 1);
  for (std::size_t c = 0; c < chart.num_cells(); ++c) pts.push_back(chart.cell_begin(c));
  pts.push_back(L);
  for (double s : f.breaks()) pts.push_back(chart.wrap(s));
  std::sort(pts.begin(), pts.end());

  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  const auto& cells = mesh.boundary_cells();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double x0 = pts[k];
    const double x1 = pts[k + 1];
    if (!(x1 > x0)) continue;
    const double mid = 0.5 * (x0 + x1);
    const std::size_t c = chart.cell_of(mid);
    const double value = f(mid);
    if (value == 0.0) continue;
    const double h = chart.cell_length(c);
    const double xi0 = std::clamp((x0 - chart.cell_begin(c)) / h, 0.0, 1.0);
    const double xi1 = std::clamp((x1 - chart.cell_begin(c)) / h, 0.0, 1.0);
    const double sq = 0.5 * (xi1 * xi1 - xi0 * xi0);
    b[cells[c].v0] += value * h * ((xi1 - xi0) - sq);
    b[cells[c].v1] += value * h * sq;
  }
  return b;
}

PLaplaceProblem::PLaplaceProblem(const DomainMesh& mesh, const PiecewiseLoad& f, double p)
    : mesh_(&mesh), p_(p), load_(assemble_load_vector(mesh, f)) {
  const auto& v = mesh.vertices();
  grads_.reserve(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double two_a = 2.0 * mesh.triangle_areas()[t];
    std::array<Point, 3> g;
    for (int k = 0; k < 3; ++k) {
      const Point& b = v[tri[(k + 1) % 3]];
      const Point& c = v[tri[(k + 2) % 3]];
      g[k] = Point(b.y() - c.y(), c.x() - b.x()) / two_a;
    }
    grads_.push_back(g);
  }
}

PLaplaceProblem::PLaplaceProblem(const DomainMesh& mesh, const LoadField& f, double p)
    : PLaplaceProblem(mesh, PiecewiseLoad::from_cells(mesh, f), p) {}

void PLaplaceProblem::check(std::span<const double> u) const {
  if (u.size() != mesh_->num_vertices()) {
    throw Error(ErrorCode::mesh_mismatch, "state has " + std::to_string(u.size()) +
                                              " nodal values but mesh has " +
                                              std::to_string(mesh_->num_vertices()) + " vertices");
  }
}

double PLaplaceProblem::energy(std::span<const double> u, double eps) const {
  check(u);
  const auto& tris = mesh_->triangles();
  const auto& areas = mesh_->triangle_areas();
  double e = 0.0;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const Point g = u[tri[0]] * grads_[t][0] + u[tri[1]] * grads_[t][1] + u[tri[2]] * grads_[t][2];
    double local = std::pow(g.squaredNorm() + eps * eps, 0.5 * p_);
    for (const auto& q : quad::kTriangle3) {
      const double uq = q.l0 * u[tri[0]] + q.l1 * u[tri[1]] + q.l2 * u[tri[2]];
      local += q.w * pow_abs(uq, p_);
    }
    e += areas[t] * local / p_;
  }
  return e - load_pairing(u);
}

Eigen::VectorXd PLaplaceProblem::residual(std::span<const double> u, double eps) const {
  check(u);
  const auto& tris = mesh_->triangles();
  const auto& areas = mesh_->triangle_areas();
  Eigen::VectorXd r = -load_;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const Point g = u[tri[0]] * grads_[t][0] + u[tri[1]] * grads_[t][1] + u[tri[2]] * grads_[t][2];
    const double s = g.squaredNorm() + eps * eps;
    const double flux = s > 0.0 ? std::pow(s, 0.5 * (p_ - 2.0)) : 0.0;
    std::array<double, 3> local{};
    for (int k = 0; k < 3; ++k) local[k] = flux * g.dot(grads_[t][k]);
    for (const auto& q : quad::kTriangle3) {
      const double uq = q.l0 * u[tri[0]] + q.l1 * u[tri[1]] + q.l2 * u[tri[2]];
      const double m = q.w * std::copysign(pow_abs(uq, p_ - 1.0), uq);
      local[0] += m * q.l0;
      local[1] += m * q.l1;
      local[2] += m * q.l2;
    }
    for (int k = 0; k < 3; ++k) r[tri[k]] += areas[t] * local[k];
  }
  return r;
}

Eigen::SparseMatrix<double> PLaplaceProblem::hessian(std::span<const double> u, double eps) const {
  check(u);
  const auto& tris = mesh_->triangles();
  const auto& areas = mesh_->triangle_areas();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(tris.size() * 9);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const auto& G = grads_[t];
    const Point g = u[tri[0]] * G[0] + u[tri[1]] * G[1] + u[tri[2]] * G[2];
    const double s = std::max(g.squaredNorm() + eps * eps, kGradFloor);
    const double a = std::pow(s, 0.5 * (p_ - 2.0));
    const Eigen::Matrix2d M =
        a * (Eigen::Matrix2d::Identity() + (p_ - 2.0) * (g * g.transpose()) / s);
    double mass[3][3] = {};
    for (const auto& q : quad::kTriangle3) {
      const double uq = q.l0 * u[tri[0]] + q.l1 * u[tri[1]] + q.l2 * u[tri[2]];
      const double absu = p_ < 2.0 ? std::max(std::abs(uq), kValueFloor) : std::abs(uq);
      const double m = q.w * (p_ - 1.0) * std::pow(absu, p_ - 2.0);
      const double l[3] = {q.l0, q.l1, q.l2};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mass[i][j] += m * l[i] * l[j];
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double kij = G[i].dot(M * G[j]) + mass[i][j];
        trip.emplace_back(tri[i], tri[j], areas[t] * kij);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh_->num_vertices());
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

double PLaplaceProblem::load_pairing(std::span<const double> u) const {
  check(u);
  return load_.dot(Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size())));
}

double energy(const DomainMesh& mesh, const StateField& u, const LoadField& f, double p, double eps) {
  return PLaplaceProblem(mesh, f, p).energy(u.nodal_values, eps);
}

Eigen::VectorXd residual(const DomainMesh& mesh, const StateField& u, const LoadField& f, double p,
                         double eps) {
  return PLaplaceProblem(mesh, f, p).residual(u.nodal_values, eps);
}

std::vector<double> cell_trace(const DomainMesh& mesh, std::span<const double> nodal) {
  std::vector<double> trace;
  trace.reserve(mesh.num_boundary_cells());
  for (const auto& c : mesh.boundary_cells()) trace.push_back(0.5 * (nodal[c.v0] + nodal[c.v1]));
  return trace;
}

StateField make_state(const DomainMesh& mesh, std::vector<double> nodal, double p, double eps) {
  if (nodal.size() != mesh.num_vertices()) {
    throw Error(ErrorCode::mesh_mismatch, "nodal vector length does not match the mesh");
  }
  StateField s;
  s.boundary_trace = cell_trace(mesh, nodal);
  s.nodal_values = std::move(nodal);
  s.p = p;
  s.epsilon = eps;
  return s;
}

double trace_at(const DomainMesh& mesh, const ArclengthChart& chart, std::span<const double> nodal,
                double s) {
  const double w = chart.wrap(s);
  const std::size_t c = chart.cell_of(w);
  const double xi = chart.local_coordinate(c, w);
  const auto& cell = mesh.boundary_cells()[c];
  return (1.0 - xi) * nodal[cell.v0] + xi * nodal[cell.v1];
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  bool stalled = false;
};

NewtonOutcome newton_stage(const PLaplaceProblem& problem, const SolveConfig& cfg, double eps,
                           Eigen::VectorXd& u, StageReport& stage) {
  auto span_of = [](const Eigen::VectorXd& v) {
    return std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
  };
  double E = problem.energy(span_of(u), eps);
  Eigen::VectorXd r = problem.residual(span_of(u), eps);
  stage.energy.push_back(E);
  stage.residual_norm = r.norm();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  for (int it = 0; it < cfg.max_newton_iters; ++it) {
    if (stage.residual_norm <= cfg.newton_tol) return {true, false};

    const Eigen::SparseMatrix<double> H = problem.hessian(span_of(u), eps);
    if (!analyzed) {
      ldlt.analyzePattern(H);
      analyzed = true;
    }
    ldlt.factorize(H);
    Eigen::VectorXd d;
    bool newton_ok = ldlt.info() == Eigen::Success;
    if (newton_ok) {
      d = -ldlt.solve(r);
      newton_ok = d.allFinite() && r.dot(d) < 0.0;
    }
    if (!newton_ok) {
      d = -r;
      ++stage.gradient_steps;
    }

    const double slope = r.dot(d);
    const double noise = kEnergyNoise * (1.0 + std::abs(E));
    Eigen::VectorXd trial;
    Eigen::VectorXd r_trial;
    double E_trial = E;
    bool accepted = false;
    if (-slope > noise) {
      // Armijo backtracking on the energy.
      for (double alpha = 1.0; alpha >= kMinStep; alpha *= cfg.line_search_shrink) {
        trial = u + alpha * d;
        E_trial = problem.energy(span_of(trial), eps);
        if (std::isfinite(E_trial) && E_trial <= E + cfg.armijo * alpha * slope) {
          accepted = true;
          break;
        }
      }
      if (accepted) r_trial = problem.residual(span_of(trial), eps);
    } else {
      // The predicted decrease is below energy rounding, so the energy cannot
      // rank trial points: backtrack on the residual norm instead, and allow
      // the energy to move only within rounding.
      for (double alpha = 1.0; alpha >= 1e-4; alpha *= cfg.line_search_shrink) {
        trial = u + alpha * d;
        E_trial = problem.energy(span_of(trial), eps);
        r_trial = problem.residual(span_of(trial), eps);
        if (r_trial.norm() <= (1.0 - cfg.armijo * alpha) * stage.residual_norm &&
            E_trial <= E + noise) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) return {false, true};
    u = std::move(trial);
    E = E_trial;
    r = std::move(r_trial);
    stage.energy.push_back(E);
    stage.residual_norm = r.norm();
    ++stage.iterations;
  }
  return {stage.residual_norm <= cfg.newton_tol, false};
}

}  // namespace

SolveResult solve(const DomainMesh& mesh, const PiecewiseLoad& f, const SolveConfig& config,
                  const std::vector<double>* initial_guess) {
  config.validate();
  for (double v : f.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::load_invalid, "load contains non-finite values");
  }
  const double p = config.p;
  const PLaplaceProblem problem(mesh, f, p);
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());

  Eigen::VectorXd u(n);
  if (initial_guess != nullptr) {
    if (static_cast<Eigen::Index>(initial_guess->size()) != n) {
      throw Error(ErrorCode::mesh_mismatch, "initial guess length does not match the mesh");
    }
    u = Eigen::Map<const Eigen::VectorXd>(initial_guess->data(), n);
  } else {
    // Constant balancing the total load against the |u|^{p-2}u term.
    const double F = problem.load_vector().sum();
    const double c = std::copysign(std::pow(std::abs(F) / mesh.area(), 1.0 / (p - 1.0)), F);
    u.setConstant(c);
  }

  SolveResult result;
  auto& report = result.report;
  bool ok = true;
  double eps = config.eps_final;
  for (double e : config.schedule()) {
    eps = e;
    StageReport stage;
    stage.epsilon = e;
    const NewtonOutcome out = newton_stage(problem, config, e, u, stage);
    stage.converged = out.converged;
    report.stages.push_back(std::move(stage));
    // Intermediate stages only supply warm starts; the final stage decides.
    ok = out.converged;
  }
  report.converged = ok;
  report.residual_norm = report.stages.back().residual_norm;

  std::vector<double> nodal(u.data(), u.data() + u.size());
  result.state = make_state(mesh, std::move(nodal), p, eps);
  report.J = functional_J(mesh, f, result.state);
  report.I = functional_I(mesh, result.state, f, p);
  report.duality_gap = std::abs(report.J - report.I);
  return result;
}

SolveResult solve(const DomainMesh& mesh, const LoadField& f, const SolveConfig& config) {
  return solve(mesh, PiecewiseLoad::from_cells(mesh, f), config);
}

const SolveResult& require_converged(const SolveResult& result, const std::string& context) {
  if (!result.report.converged) {
    std::ostringstream os;
    os << context << ": Newton did not converge (residual " << result.report.residual_norm
       << " after " << result.report.total_iterations() << " iterations)";
    throw SolverError(os.str(), result.report);
  }
  return result;
}

double functional_J(const DomainMesh& mesh, const LoadField& f, const StateField& u) {
  check_same_mesh(mesh, f);
  if (u.boundary_trace.size() != f.size()) {
    throw Error(ErrorCode::mesh_mismatch, "state trace length does not match the load");
  }
  double j = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) j += f.values[c] * u.boundary_trace[c] * f.weight;
  return j;
}

double functional_J(const DomainMesh& mesh, const PiecewiseLoad& f, const StateField& u) {
  if (u.nodal_values.size() != mesh.num_vertices()) {
    throw Error(ErrorCode::mesh_mismatch, "state does not live on this mesh");
  }
  const Eigen::VectorXd b = assemble_load_vector(mesh, f);
  return b.dot(Eigen::Map<const Eigen::VectorXd>(u.nodal_values.data(), b.size()));
}

double volume_term(const DomainMesh& mesh, std::span<const double> u, double p) {
  if (u.size() != mesh.num_vertices()) {
    throw Error(ErrorCode::mesh_mismatch, "state does not live on this mesh");
  }
  const auto& v = mesh.vertices();
  const auto& tris = mesh.triangles();
  const auto& areas = mesh.triangle_areas();
  double acc = 0.0;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const double two_a = 2.0 * areas[t];
    Point g = Point::Zero();
    for (int k = 0; k < 3; ++k) {
      const Point& b = v[tri[(k + 1) % 3]];
      const Point& c = v[tri[(k + 2) % 3]];
      g += u[tri[k]] * Point(b.y() - c.y(), c.x() - b.x()) / two_a;
    }
    double local = std::pow(g.norm(), p);
    for (const auto& q : quad::kTriangle3) {
      const double uq = q.l0 * u[tri[0]] + q.l1 * u[tri[1]] + q.l2 * u[tri[2]];
      local += q.w * pow_abs(uq, p);
    }
    acc += areas[t] * local;
  }
  return acc;
}

double functional_I(const DomainMesh& mesh, const StateField& u, const LoadField& f, double p) {
  return (p * functional_J(mesh, f, u) - volume_term(mesh, u.nodal_values, p)) / (p - 1.0);
}

double functional_I(const DomainMesh& mesh, const StateField& u, const PiecewiseLoad& f, double p) {
  return (p * functional_J(mesh, f, u) - volume_term(mesh, u.nodal_values, p)) / (p - 1.0);
}

double w1p_distance(const DomainMesh& mesh, std::span<const double> u, std::span<const double> v,
                    double p) {
  if (u.size() != v.size()) throw Error(ErrorCode::mesh_mismatch, "states differ in length");
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - v[i];
  return std::pow(volume_term(mesh, d, p), 1.0 / p);
}

}  // namespace plap
