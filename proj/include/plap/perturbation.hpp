#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "plap/geometry2d.hpp"
#include "plap/load.hpp"
#include "plap/plap_solver.hpp"

namespace plap {

/// Tangential speed v(s) on the periodic arclength chart, a finite sum of
/// catalog terms (constant, sin/cos(2 pi k s / L), smooth bump). The boundary
/// velocity is V = v tau, so <V, nu> = 0 by construction.
class TangentField {
 public:
  enum class Kind { constant, sine, cosine, bump };
  struct Term {
    Kind kind = Kind::constant;
    double amplitude = 1.0;
    int k = 1;
    double center = 0.0;
    double width = 1.0;
  };

  static TangentField constant(double value, double period);
  static TangentField sine(int k, double period, double amplitude = 1.0);
  static TangentField cosine(int k, double period, double amplitude = 1.0);
  /// exp(1 - 1/(1 - (d/width)^2)) for periodic distance |d| < width, else 0.
  static TangentField bump(double center, double width, double period, double amplitude = 1.0);
  /// Parses `constant`, `constant:<value>`, `sin:<k>`, `cos:<k>`,
  /// `bump:<center>,<width>` (arclength units).
  static TangentField parse(std::string_view spec, double period);

  double period() const { return period_; }
  const std::vector<Term>& terms() const { return terms_; }
  double value(double s) const;
  double derivative(double s) const;
  bool is_zero() const;
  std::string name() const;

  friend TangentField operator+(const TangentField& a, const TangentField& b);

 private:
  TangentField(std::vector<Term> terms, double period);
  std::vector<Term> terms_;
  double period_ = 1.0;
};

/// Flow of ds/dt = v(s) on the chart, integrated by classical RK4 together
/// with the variational equation for d psi_t / ds.
class BoundaryFlow {
 public:
  BoundaryFlow(TangentField field, double t);

  double time() const { return t_; }
  const TangentField& field() const { return field_; }
  /// psi_t(s), unwrapped (psi_t(s + L) = psi_t(s) + L).
  double forward(double s) const;
  /// psi_t^{-1}(s) = psi_{-t}(s).
  double inverse(double s) const;
  /// Tangential Jacobian d psi_t / ds at s.
  double jacobian(double s) const;

  /// RK4 steps used for a flow over time |t|.
  static int steps_for(double t);

 private:
  TangentField field_;
  double t_;
};

double flow_map(const TangentField& v, double t, double s);
double tangential_jacobian(const TangentField& v, double t, double s);

/// f_t = f o psi_t^{-1}: the same piece values on the transported breakpoints.
PiecewiseLoad transport_load(const PiecewiseLoad& f, const TangentField& v, double t);

/// Interior extension of the boundary velocity, supported in a collar.
class VelocityExtension {
 public:
  virtual ~VelocityExtension() = default;
  virtual Eigen::Vector2d value(const Point& x) const = 0;
  /// Jacobian V'_{ij} = d V_i / d x_j.
  virtual Eigen::Matrix2d jacobian(const Point& x) const = 0;
  virtual double divergence(const Point& x) const { return jacobian(x).trace(); }
  virtual bool analytic() const = 0;
};

/// Quintic smoothstep cutoff: eta(0) = 1, eta(d) = 0 for d >= delta, C^2.
double collar_cutoff(double distance, double delta);
double collar_cutoff_derivative(double distance, double delta);

/// Analytic extension on a disk: V(x) = eta(R - r) * omega(theta) * (-y, x)
/// with omega(theta) = (2 pi / L) v(L theta / (2 pi)), so the interior flow
/// restricted to the circle matches the chart flow.
std::unique_ptr<VelocityExtension> make_disk_extension(const DiskGeometry& disk, double boundary_length,
                                                       const TangentField& v, double collar_fraction);

/// Disk meshes get the analytic extension; anything else falls back to a
/// nearest-boundary-point extension with a finite-difference Jacobian and a
/// warning on standard error.
std::unique_ptr<VelocityExtension> make_extension(const DomainMesh& mesh, const TangentField& v,
                                                  double collar_fraction);

/// Periodic cubic interpolating spline on equally spaced nodes
/// x_k = offset + k * L / n.
class PeriodicSpline {
 public:
  PeriodicSpline(std::vector<double> values, double offset, double period);
  double operator()(double s) const;
  double derivative(double s) const;

 private:
  std::size_t locate(double s, double& tau) const;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives
  double offset_;
  double period_;
  double h_;
};

struct DerivativeConfig {
  // Orientation sign of the jump-measure formula, fixed against the
  // finite-difference derivative (see the perturbation tests): the
  // derivative equals -(p/(p-1)) sum_i u0(s_i) v(s_i) (f_i - f_{i-1}) with
  // jumps taken in increasing arclength.
  double jump_sign = -1.0;
  // Sign of the surface-divergence formula, confirmed the same way.
  double surfdiv_sign = 1.0;
  double fd_t = 1e-3;
  double collar_fraction = 0.3;
  SolveConfig solve;
};

double deriv_volume_formula(const DomainMesh& mesh, const StateField& u0, const PiecewiseLoad& f,
                            const TangentField& v, double p, double collar_fraction = 0.3);
double deriv_surfdiv_formula(const DomainMesh& mesh, const StateField& u0, const PiecewiseLoad& f,
                             const TangentField& v, double p, double sign = 1.0);
double deriv_bvjump_formula(const DomainMesh& mesh, const StateField& u0, const PiecewiseLoad& f,
                            const TangentField& v, double p, double sign = -1.0);
/// (J(f_t) - J(f_{-t})) / (2t), each J from a full solve.
double deriv_finite_difference(const DomainMesh& mesh, const PiecewiseLoad& f, const TangentField& v,
                               double t, const SolveConfig& config);

struct Discrepancy {
  std::string a;
  std::string b;
  double value;
};

/// |a - b| / max(|a|, |b|), zero when both vanish.
double relative_discrepancy(double a, double b);

struct DerivativeReport {
  double d_volume = 0.0;
  double d_surfdiv = 0.0;
  double d_bvjump = 0.0;
  double d_findiff = 0.0;
  double J = 0.0;
  double p = 2.0;
  double t = 0.0;
  std::size_t n_cells = 0;
  std::size_t n_vertices = 0;
  std::string field;
  bool analytic_extension = true;

  std::vector<Discrepancy> discrepancies() const;
  double max_discrepancy() const;
  double max_abs_estimate() const;
};

/// Solves for u0 and evaluates all four estimates of d/dt J(f_t) at t = 0.
DerivativeReport derivative_report(const DomainMesh& mesh, const PiecewiseLoad& f,
                                   const TangentField& v, const DerivativeConfig& config);
DerivativeReport derivative_report(const DomainMesh& mesh, const LoadField& f, const TangentField& v,
                                   const DerivativeConfig& config);

struct TransportSample {
  double t = 0.0;
  double load_distance = 0.0;  // ||f_t - f||_{L^q}, q = p/(p-1)
  double state_distance = 0.0;  // ||u_t - u0||_{W^{1,p}}
};

std::vector<TransportSample> transported_solution_check(const DomainMesh& mesh, const PiecewiseLoad& f,
                                                        const TangentField& v,
                                                        const std::vector<double>& t_sequence,
                                                        const SolveConfig& config);

}  // namespace plap
