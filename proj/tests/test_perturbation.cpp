#include <doctest.h>

#include <cmath>
#include <numbers>

#include "plap/perturbation.hpp"
#include "plap/rearrangement.hpp"
#include "plap_verify/acceptance.hpp"

using namespace plap;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const DomainMesh& disk(int n) {
  static const DomainMesh m64 = build_disk_mesh(1.0, 64, 10);
  static const DomainMesh m128 = build_disk_mesh(1.0, 128, 20);
  return n == 64 ? m64 : m128;
}

}  // namespace

TEST_CASE("field parsing") {
  CHECK(TangentField::parse("sin:2", kTwoPi).value(0.25 * std::numbers::pi) == doctest::Approx(1.0));
  CHECK(TangentField::parse("cos:1", kTwoPi).value(0.0) == doctest::Approx(1.0));
  CHECK(TangentField::parse("constant", kTwoPi).value(3.0) == 1.0);
  CHECK(TangentField::parse("constant:2.5", kTwoPi).value(3.0) == 2.5);
  CHECK(TangentField::parse("bump:1,0.5", kTwoPi).value(1.0) == doctest::Approx(1.0));
  CHECK(TangentField::parse("bump:1,0.5", kTwoPi).value(1.6) == 0.0);
  for (const char* bad : {"sine:1", "sin:0", "sin:1.5", "bump:1", "bump:1,9", "cos:x"}) {
    CHECK_THROWS_AS(TangentField::parse(bad, kTwoPi), Error);
  }
}

TEST_CASE("flow examples") {
  const TangentField one = TangentField::constant(1.0, kTwoPi);
  CHECK(flow_map(one, 0.5, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(tangential_jacobian(one, 0.7, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  const TangentField zero = TangentField::constant(0.0, kTwoPi);
  CHECK(flow_map(zero, 0.3, 1.2) == 1.2);

  const TangentField s1 = TangentField::sine(1, kTwoPi);
  for (double s : {0.0, 0.5, 2.0, 4.0}) {
    CHECK(std::abs(flow_map(s1, 1e-3, s) - s - 1e-3 * std::sin(s)) <= 1e-5);
  }
  CHECK(tangential_jacobian(s1, 1e-3, 0.0) == doctest::Approx(1.0 + 1e-3).epsilon(1e-6));
}

TEST_CASE("flow inverse and Jacobian integrate to the period") {
  const TangentField v = TangentField::sine(1, kTwoPi) + TangentField::bump(2.0, 0.8, kTwoPi);
  const BoundaryFlow flow(v, 0.4);
  for (double s : {0.1, 1.9, 3.3, 5.0}) CHECK(flow.inverse(flow.forward(s)) == doctest::Approx(s).epsilon(1e-12));
  const int n = 4000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += flow.jacobian(kTwoPi * (k + 0.5) / n);
  CHECK(acc * kTwoPi / n == doctest::Approx(kTwoPi).epsilon(1e-8));
}

TEST_CASE("transport: identity, rigid shift, L^q decay") {
  const DomainMesh& m = disk(64);
  const double L = m.total_boundary_length();
  const double h = L / 64.0;
  const LoadField cells = acceptance::step_load(m, 0, 16);
  const PiecewiseLoad f = PiecewiseLoad::from_cells(m, cells);
  const TangentField v = TangentField::sine(1, L) + TangentField::cosine(1, L);

  const PiecewiseLoad f0 = transport_load(f, v, 0.0);
  for (double s : {0.01, 1.0, 3.0, 5.5}) CHECK(f0(s) == f(s));

  const PiecewiseLoad shifted = transport_load(f, TangentField::constant(1.0, L), 3.0 * h);
  std::vector<double> sampled;
  for (std::size_t c = 0; c < 64; ++c) sampled.push_back(shifted((c + 0.5) * h));
  CHECK(distribution(LoadField(sampled, h)) == distribution(cells));
  CHECK(shifted(3.5 * h) == 1.0);
  CHECK(shifted(2.5 * h) == 0.0);

  const double q = 2.0;
  const double d1 = lq_distance(transport_load(f, v, 0.02), f, q);
  const double d2 = lq_distance(transport_load(f, v, 0.01), f, q);
  // Jump-set measure is linear in t, so the L^q norm scales like t^{1/q}.
  CHECK(std::pow(d1 / d2, q) == doctest::Approx(2.0).epsilon(2e-2));
}

TEST_CASE("derivative formulas vanish for zero fields and constant loads") {
  const DomainMesh& m = disk(64);
  const double L = m.total_boundary_length();
  const LoadField f = acceptance::step_load(m, 0, 16);
  const SolveResult base = solve(m, f, SolveConfig{});
  const PiecewiseLoad pf = PiecewiseLoad::from_cells(m, f);
  const TangentField zero = TangentField::constant(0.0, L);
  CHECK(deriv_volume_formula(m, base.state, pf, zero, 2.0, 0.3) == 0.0);
  CHECK(deriv_surfdiv_formula(m, base.state, pf, zero, 2.0) == 0.0);
  CHECK(deriv_bvjump_formula(m, base.state, pf, zero, 2.0) == 0.0);
  CHECK(deriv_finite_difference(m, pf, zero, 1e-3, SolveConfig{}) == 0.0);

  const LoadField c = constant_load(m, 1.0);
  const SolveResult cb = solve(m, c, SolveConfig{});
  const PiecewiseLoad pc = PiecewiseLoad::from_cells(m, c);
  const TangentField s1 = TangentField::sine(1, L);
  CHECK(std::abs(deriv_surfdiv_formula(m, cb.state, pc, s1, 2.0)) < 1e-12);
  CHECK(deriv_bvjump_formula(m, cb.state, pc, s1, 2.0) == 0.0);
}

TEST_CASE("jump formula ignores jumps outside the field support") {
  const DomainMesh& m = disk(64);
  const double L = m.total_boundary_length();
  const LoadField f = acceptance::step_load(m, 0, 16);  // jumps at s = 0 and s = L/4
  const SolveResult base = solve(m, f, SolveConfig{});
  const TangentField v = TangentField::bump(0.6 * L, 0.1 * L, L);
  CHECK(deriv_bvjump_formula(m, base.state, PiecewiseLoad::from_cells(m, f), v, 2.0) == 0.0);
}

TEST_CASE("sign conventions agree with finite differences") {
  const DomainMesh& m = disk(128);
  const double L = m.total_boundary_length();
  const LoadField f = acceptance::step_load(m, 0, 32);
  const TangentField v = TangentField::sine(1, L);
  DerivativeConfig cfg;
  const DerivativeReport r = derivative_report(m, f, v, cfg);
  CHECK(cfg.jump_sign == -1.0);
  CHECK(cfg.surfdiv_sign == 1.0);
  CHECK(r.d_bvjump == doctest::Approx(r.d_findiff).epsilon(1e-3));
  CHECK(r.d_surfdiv == doctest::Approx(r.d_findiff).epsilon(1e-3));
  CHECK(r.d_volume == doctest::Approx(r.d_findiff).epsilon(1e-3));
  CHECK(r.analytic_extension);
}

TEST_CASE("formulas are linear in the field") {
  const DomainMesh& m = disk(64);
  const double L = m.total_boundary_length();
  const LoadField f = acceptance::step_load(m, 5, 20);
  const PiecewiseLoad pf = PiecewiseLoad::from_cells(m, f);
  SolveConfig sc;
  sc.p = 3.0;
  const SolveResult base = solve(m, f, sc);
  const TangentField a = TangentField::sine(1, L);
  const TangentField b = TangentField::bump(1.0, 0.9, L);
  const TangentField ab = a + b;
  using Formula = double (*)(const DomainMesh&, const StateField&, const PiecewiseLoad&, const TangentField&, double);
  const Formula formulas[] = {
      [](const DomainMesh& mm, const StateField& u, const PiecewiseLoad& ff, const TangentField& v, double p) {
        return deriv_volume_formula(mm, u, ff, v, p, 0.3);
      },
      [](const DomainMesh& mm, const StateField& u, const PiecewiseLoad& ff, const TangentField& v, double p) {
        return deriv_surfdiv_formula(mm, u, ff, v, p);
      },
      [](const DomainMesh& mm, const StateField& u, const PiecewiseLoad& ff, const TangentField& v, double p) {
        return deriv_bvjump_formula(mm, u, ff, v, p);
      }};
  for (auto F : formulas) {
    const double x = F(m, base.state, pf, a, 3.0);
    const double y = F(m, base.state, pf, b, 3.0);
    const double z = F(m, base.state, pf, ab, 3.0);
    CHECK(std::abs(z - x - y) <= 1e-10 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("central differences converge at second order with mid-cell jumps") {
  const DomainMesh& m = disk(64);
  const double L = m.total_boundary_length();
  // Breakpoints away from cell ends keep J(f_t) smooth in t.
  const double h = L / 64.0;
  const PiecewiseLoad f({2.37 * h, 17.61 * h}, {1.0, 0.0}, L);
  const TangentField v = TangentField::sine(1, L);
  const SolveConfig sc;
  const double d1 = deriv_finite_difference(m, f, v, 0.04, sc);
  const double d2 = deriv_finite_difference(m, f, v, 0.02, sc);
  const double d4 = deriv_finite_difference(m, f, v, 0.01, sc);
  const double ratio = std::abs(d1 - d2) / std::abs(d2 - d4);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("symmetric load under rotation: all estimates vanish") {
  const DomainMesh& m = disk(64);
  const LoadField f = acceptance::mirrored(acceptance::step_load(m, 0, 8));
  const DerivativeReport r = derivative_report(m, f, TangentField::constant(1.0, m.total_boundary_length()), {});
  CHECK(r.max_abs_estimate() <= 1e-4 * (1.0 + std::abs(r.J)));
}

TEST_CASE("transported solutions converge") {
  const DomainMesh& m = disk(64);
  const double L = m.total_boundary_length();
  const PiecewiseLoad f = PiecewiseLoad::from_cells(m, acceptance::step_load(m, 0, 16));
  const auto zero = transported_solution_check(m, f, TangentField::constant(0.0, L), {0.1, 0.05}, SolveConfig{});
  for (const auto& s : zero) CHECK(s.state_distance == 0.0);
  const auto samples =
      transported_solution_check(m, f, TangentField::sine(1, L) + TangentField::cosine(1, L), {0.0, 0.1, 0.05, 0.025},
                                 SolveConfig{});
  CHECK(samples[0].state_distance == 0.0);
  CHECK(samples[2].state_distance < samples[1].state_distance);
  CHECK(samples[3].state_distance < samples[2].state_distance);
}

TEST_CASE("square domain falls back to the projected extension") {
  const DomainMesh m = build_square_mesh(1.0, 8);
  const LoadField f = acceptance::step_load(m, 2, 6);
  const DerivativeReport r = derivative_report(m, f, TangentField::sine(1, m.total_boundary_length()), {});
  CHECK_FALSE(r.analytic_extension);
  CHECK(std::isfinite(r.d_volume));
  CHECK(r.d_bvjump == doctest::Approx(r.d_findiff).epsilon(5e-2));
}

TEST_CASE("periodic spline interpolates and differentiates") {
  const int n = 64;
  std::vector<double> y(n);
  const double h = kTwoPi / n;
  for (int k = 0; k < n; ++k) y[k] = std::sin((k + 0.5) * h);
  const PeriodicSpline sp(y, 0.5 * h, kTwoPi);
  for (double s : {0.0, 1.0, 2.5, 6.0}) {
    CHECK(sp(s) == doctest::Approx(std::sin(s)).epsilon(1e-5));
    CHECK(sp.derivative(s) == doctest::Approx(std::cos(s)).epsilon(1e-3));
  }
}
