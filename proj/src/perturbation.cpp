#include "plap/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "plap/error.hpp"
#include "plap/quadrature.hpp"

namespace plap {

namespace {

void check_inputs(const DomainMesh& mesh, const StateField& u0, const PiecewiseLoad& f,
                  const TangentField& v) {
  if (u0.nodal_values.size() != mesh.num_vertices()) {
    throw Error(ErrorCode::mesh_mismatch, "state does not live on this mesh");
  }
  const double L = mesh.total_boundary_length();
  if (std::abs(f.period() - L) > 1e-9 * L || std::abs(v.period() - L) > 1e-9 * L) {
    throw Error(ErrorCode::mesh_mismatch, "load or field period does not match the boundary length");
  }
}

// Sorted subdivision of [0, L) by cell ends and load breakpoints.
std::vector<double> boundary_subdivision(const ArclengthChart& chart, const PiecewiseLoad& f) {
  std::vector<double> pts;
  for (std::size_t c = 0; c < chart.num_cells(); ++c) pts.push_back(chart.cell_begin(c));
  pts.push_back(chart.length());
  for (double s : f.breaks()) pts.push_back(chart.wrap(s));
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

double deriv_volume_formula(const DomainMesh& mesh, const StateField& u0, const PiecewiseLoad& f,
                            const TangentField& v, double p, double collar_fraction) {
  check_inputs(mesh, u0, f, v);
  if (v.is_zero()) return 0.0;
  const auto& u = u0.nodal_values;

  // int_dOmega u0 f div_tau V, with div_tau V = v'(s) on the curve.
  const ArclengthChart chart(mesh);
  const auto pts = boundary_subdivision(chart, f);
  double boundary = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double x0 = pts[k];
    const double len = pts[k + 1] - x0;
    if (!(len > 0.0)) continue;
    const double value = f(x0 + 0.5 * len);
    if (value == 0.0) continue;
    double acc = 0.0;
    for (const auto& q : quad::kGauss3) {
      const double s = x0 + q.x * len;
      acc += q.w * trace_at(mesh, chart, u, s) * v.derivative(s);
    }
    boundary += value * acc * len;
  }

  const auto ext = make_extension(mesh, v, collar_fraction);
  const auto& verts = mesh.vertices();
  const auto& tris = mesh.triangles();
  const auto& areas = mesh.triangle_areas();
  double shear = 0.0;  // int |grad u|^{p-2} <grad u, V' grad u>
  double dilation = 0.0;  // int (|grad u|^p + |u|^p) div V
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const Point& a = verts[tri[0]];
    const Point& b = verts[tri[1]];
    const Point& c = verts[tri[2]];
    const double two_a = 2.0 * areas[t];
    const Point g = (u[tri[0]] * Point(b.y() - c.y(), c.x() - b.x()) +
                     u[tri[1]] * Point(c.y() - a.y(), a.x() - c.x()) +
                     u[tri[2]] * Point(a.y() - b.y(), b.x() - a.x())) /
                    two_a;
    const double gn = g.norm();
    const double gp = std::pow(gn, p);
    const double gpm2 = gn > 0.0 ? gp / (gn * gn) : 0.0;
    double s_acc = 0.0;
    double d_acc = 0.0;
    for (const auto& q : quad::kTriangle7) {
      const Point x = q.l0 * a + q.l1 * b + q.l2 * c;
      const Eigen::Matrix2d Vp = ext->jacobian(x);
      if (Vp.isZero(0.0)) continue;
      const double uq = q.l0 * u[tri[0]] + q.l1 * u[tri[1]] + q.l2 * u[tri[2]];
      s_acc += q.w * gpm2 * g.dot(Vp * g);
      d_acc += q.w * (gp + std::pow(std::abs(uq), p)) * ext->divergence(x);
    }
    shear += areas[t] * s_acc;
    dilation += areas[t] * d_acc;
  }
  return (p * boundary + p * shear - dilation) / (p - 1.0);
}

double deriv_surfdiv_formula(const DomainMesh& mesh, const StateField& u0, const PiecewiseLoad& f,
                             const TangentField& v, double p, double sign) {
  check_inputs(mesh, u0, f, v);
  const double L = mesh.total_boundary_length();
  const double h = L / static_cast<double>(mesh.num_boundary_cells());
  // Cell averages interpolated at cell midpoints.
  const PeriodicSpline trace(u0.boundary_trace, 0.5 * h, L);
  auto uv = [&](double s) { return trace(s) * v.value(s); };
  // On each piece f is constant, so int (u0 v)' f ds telescopes exactly.
  double acc = 0.0;
  for (std::size_t k = 0; k < f.num_pieces(); ++k) {
    const double a = f.piece_begin(k);
    const double b = f.piece_end(k);
    if (!(b > a)) continue;
    acc += f.values()[k] * (uv(b) - uv(a));
  }
  return sign * p / (p - 1.0) * acc;
}

double deriv_bvjump_formula(const DomainMesh& mesh, const StateField& u0, const PiecewiseLoad& f,
                            const TangentField& v, double p, double sign) {
  check_inputs(mesh, u0, f, v);
  const ArclengthChart chart(mesh);
  const auto& vals = f.values();
  const std::size_t n = vals.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double jump = vals[k] - vals[(k + n - 1) % n];
    if (jump == 0.0) continue;
    const double s = f.piece_begin(k);
    acc += trace_at(mesh, chart, u0.nodal_values, s) * v.value(s) * jump;
  }
  return sign * p / (p - 1.0) * acc;
}

double deriv_finite_difference(const DomainMesh& mesh, const PiecewiseLoad& f, const TangentField& v,
                               double t, const SolveConfig& config) {
  if (!(t > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "finite-difference t must be positive");
  if (v.is_zero()) return 0.0;
  auto J_at = [&](double tau) {
    const PiecewiseLoad ft = transport_load(f, v, tau);
    const SolveResult r = solve(mesh, ft, config);
    require_converged(r, "finite difference at t=" + std::to_string(tau));
    return r.report.J;
  };
  double jp = 0.0;
  double jm = 0.0;
  if (std::thread::hardware_concurrency() > 1) {
    auto plus = std::async(std::launch::async, J_at, t);
    jm = J_at(-t);
    jp = plus.get();
  } else {
    jp = J_at(t);
    jm = J_at(-t);
  }
  return (jp - jm) / (2.0 * t);
}

double relative_discrepancy(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<Discrepancy> DerivativeReport::discrepancies() const {
  const std::pair<const char*, double> est[] = {
      {"volume", d_volume}, {"surfdiv", d_surfdiv}, {"bvjump", d_bvjump}, {"findiff", d_findiff}};
  std::vector<Discrepancy> out;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      out.push_back({est[i].first, est[j].first, relative_discrepancy(est[i].second, est[j].second)});
    }
  }
  return out;
}

double DerivativeReport::max_discrepancy() const {
  double m = 0.0;
  for (const auto& d : discrepancies()) m = std::max(m, d.value);
  return m;
}

double DerivativeReport::max_abs_estimate() const {
  return std::max({std::abs(d_volume), std::abs(d_surfdiv), std::abs(d_bvjump), std::abs(d_findiff)});
}

DerivativeReport derivative_report(const DomainMesh& mesh, const PiecewiseLoad& f,
                                   const TangentField& v, const DerivativeConfig& config) {
  const double p = config.solve.p;
  const SolveResult base = solve(mesh, f, config.solve);
  require_converged(base, "derivative base solve");
  DerivativeReport r;
  r.p = p;
  r.t = config.fd_t;
  r.J = base.report.J;
  r.n_cells = mesh.num_boundary_cells();
  r.n_vertices = mesh.num_vertices();
  r.field = v.name();
  r.analytic_extension = detect_disk(mesh).has_value();
  r.d_volume = deriv_volume_formula(mesh, base.state, f, v, p, config.collar_fraction);
  r.d_surfdiv = deriv_surfdiv_formula(mesh, base.state, f, v, p, config.surfdiv_sign);
  r.d_bvjump = deriv_bvjump_formula(mesh, base.state, f, v, p, config.jump_sign);
  r.d_findiff = deriv_finite_difference(mesh, f, v, config.fd_t, config.solve);
  return r;
}

DerivativeReport derivative_report(const DomainMesh& mesh, const LoadField& f, const TangentField& v,
                                   const DerivativeConfig& config) {
  return derivative_report(mesh, PiecewiseLoad::from_cells(mesh, f), v, config);
}

std::vector<TransportSample> transported_solution_check(const DomainMesh& mesh, const PiecewiseLoad& f,
                                                        const TangentField& v,
                                                        const std::vector<double>& t_sequence,
                                                        const SolveConfig& config) {
  const double p = config.p;
  const double q = p / (p - 1.0);
  const SolveResult base = solve(mesh, f, config);
  require_converged(base, "transport check base solve");
  std::vector<TransportSample> out;
  out.reserve(t_sequence.size());
  for (double t : t_sequence) {
    TransportSample sample;
    sample.t = t;
    if (t != 0.0 && !v.is_zero()) {
      const PiecewiseLoad ft = transport_load(f, v, t);
      const SolveResult r = solve(mesh, ft, config);
      require_converged(r, "transport check at t=" + std::to_string(t));
      sample.load_distance = lq_distance(ft, f, q);
      sample.state_distance = w1p_distance(mesh, r.state.nodal_values, base.state.nodal_values, p);
    }
    out.push_back(sample);
  }
  return out;
}

}  // namespace plap
