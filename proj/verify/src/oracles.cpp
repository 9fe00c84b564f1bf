#include "plap_verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "plap/error.hpp"

namespace plap::oracle {

double linear_disk_trace(double radius) { return std::cyl_bessel_i(0.0, radius) / std::cyl_bessel_i(1.0, radius); }

double linear_disk_J(double radius) { return 2.0 * std::numbers::pi * radius * linear_disk_trace(radius); }

namespace {

// State (u, w) with w = r |u'|^{p-2} u'; u' = sgn(w) |w/r|^{1/(p-1)}, w' = r |u|^{p-2} u.
struct Radial {
  double p;
  void rhs(double r, double u, double w, double& du, double& dw) const {
    const double q = w / r;
    du = std::copysign(std::pow(std::abs(q), 1.0 / (p - 1.0)), q);
    dw = r * std::copysign(std::pow(std::abs(u), p - 1.0), u);
  }
};

// Flux |u'|^{p-2} u' at r = R for center value a.
double shoot(double p, double R, double a, int steps) {
  const Radial sys{p};
  // Series start away from the singular point: w ~ r^2 a^{p-1} / 2.
  const double r0 = 1e-6 * R;
  double u = a;
  double w = 0.5 * r0 * r0 * std::pow(a, p - 1.0);
  const double h = (R - r0) / steps;
  double r = r0;
  for (int i = 0; i < steps; ++i) {
    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    sys.rhs(r, u, w, k1u, k1w);
    sys.rhs(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    sys.rhs(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    sys.rhs(r + h, u + h * k3u, w + h * k3w, k4u, k4w);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    r += h;
  }
  return w / R;
}

}  // namespace

RadialProfile radial_shooting(double p, double radius, double flux, int steps) {
  if (!(flux > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "radial oracle needs a positive flux");
  // Flux is increasing in the center value; bracket, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  while (shoot(p, radius, hi, steps) < flux) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shoot(p, radius, mid, steps) < flux ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);

  // Integrate once more to read off u(R).
  const Radial sys{p};
  const double r0 = 1e-6 * radius;
  double u = a;
  double w = 0.5 * r0 * r0 * std::pow(a, p - 1.0);
  const double h = (radius - r0) / steps;
  double r = r0;
  for (int i = 0; i < steps; ++i) {
    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    sys.rhs(r, u, w, k1u, k1w);
    sys.rhs(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    sys.rhs(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    sys.rhs(r + h, u + h * k3u, w + h * k3w, k4u, k4w);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    r += h;
  }
  RadialProfile out;
  out.center_value = a;
  out.boundary_value = u;
  out.J = 2.0 * std::numbers::pi * radius * flux * u;
  return out;
}

double exhaustive_max_L(std::vector<double> values, const std::vector<double>& trace, double weight) {
  std::sort(values.begin(), values.end());
  double best = -INFINITY;
  do {
    double acc = 0.0;
    for (std::size_t c = 0; c < values.size(); ++c) acc += values[c] * trace[c];
    best = std::max(best, acc * weight);
  } while (std::next_permutation(values.begin(), values.end()));
  return best;
}

ExhaustiveResult exhaustive_max_J(const DomainMesh& mesh, const LoadField& f0, const SolveConfig& config) {
  std::vector<double> v = f0.values;
  std::sort(v.begin(), v.end());
  ExhaustiveResult out;
  out.J = -INFINITY;
  do {
    const LoadField f(v, f0.weight);
    const SolveResult r = solve(mesh, f, config);
    require_converged(r, "exhaustive enumeration");
    if (r.report.J > out.J) {
      out.J = r.report.J;
      out.argmax = f;
    }
    ++out.count;
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

double random_sampling_max_J(const DomainMesh& mesh, const LoadField& f0, const SolveConfig& config,
                             int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = -INFINITY;
  LoadField f = f0;
  for (int k = 0; k < samples; ++k) {
    for (std::size_t i = f.size(); i > 1; --i) std::swap(f.values[i - 1], f.values[rng() % i]);
    const SolveResult r = solve(mesh, f, config);
    require_converged(r, "random sampling");
    best = std::max(best, r.report.J);
  }
  return best;
}

}  // namespace plap::oracle
