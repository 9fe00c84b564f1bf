#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plap/plap_solver.hpp"
#include "plap_verify/oracles.hpp"

using namespace plap;

namespace {

const DomainMesh& disk64() {
  static const DomainMesh m = build_disk_mesh(1.0, 64, 10);
  return m;
}

StateField constant_state(const DomainMesh& m, double c, double p) {
  return make_state(m, std::vector<double>(m.num_vertices(), c), p, 0.0);
}

}  // namespace

TEST_CASE("energy of simple fields") {
  const DomainMesh& m = disk64();
  const LoadField zero = constant_load(m, 0.0);
  const LoadField one = constant_load(m, 1.0);
  CHECK(energy(m, constant_state(m, 0.0, 3.0), one, 3.0, 0.0) == 0.0);
  CHECK(energy(m, constant_state(m, 0.7, 2.0), zero, 2.0, 0.0) ==
        doctest::Approx(0.5 * 0.49 * m.area()).epsilon(1e-13));
  CHECK(energy(m, constant_state(m, 0.0, 2.0), zero, 2.0, 0.1) ==
        doctest::Approx(0.5 * 0.01 * m.area()).epsilon(1e-13));
  CHECK(residual(m, constant_state(m, 0.0, 2.0), zero, 2.0, 0.0).norm() == 0.0);
}

TEST_CASE("residual is the gradient of the energy") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> u(m.num_vertices()), fv(m.num_boundary_cells());
  for (double& x : u) x = U(rng);
  for (double& x : fv) x = U(rng);
  const double p = 3.0, eps = 0.01, h = 1e-5;
  const PLaplaceProblem prob(m, make_load(m, fv), p);
  const Eigen::VectorXd r = prob.residual(u, eps);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto up = u, um = u;
    up[i] += h;
    um[i] -= h;
    const double fd = (prob.energy(up, eps) - prob.energy(um, eps)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - r[static_cast<Eigen::Index>(i)]) / (1e-3 + std::abs(fd)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("zero load gives the zero solution") {
  const DomainMesh& m = disk64();
  const SolveResult r = solve(m, constant_load(m, 0.0), SolveConfig{});
  CHECK(r.report.converged);
  CHECK(r.report.J == 0.0);
  for (double x : r.state.nodal_values) CHECK(x == 0.0);
}

TEST_CASE("p = 2 trace matches the Bessel solution") {
  const DomainMesh& m = disk64();
  const SolveResult r = solve(m, constant_load(m, 1.0), SolveConfig{});
  REQUIRE(r.report.converged);
  const double trace = oracle::linear_disk_trace(1.0);
  CHECK(trace == doctest::Approx(2.2401937).epsilon(1e-7));
  for (double t : r.state.boundary_trace) CHECK(std::abs(t - trace) / trace < 1e-2);
  CHECK(std::abs(r.report.J - oracle::linear_disk_J(1.0)) / oracle::linear_disk_J(1.0) < 1e-2);
}

TEST_CASE("p = 3 trace matches radial shooting") {
  const auto ref = oracle::radial_shooting(3.0, 1.0, 1.0);
  CHECK(ref.center_value == doctest::Approx(1.08381).epsilon(1e-5));
  CHECK(ref.boundary_value == doctest::Approx(1.66949).epsilon(1e-5));
  const DomainMesh& m = disk64();
  SolveConfig cfg;
  cfg.p = 3.0;
  const SolveResult r = solve(m, constant_load(m, 1.0), cfg);
  REQUIRE(r.report.converged);
  for (double t : r.state.boundary_trace) CHECK(std::abs(t - ref.boundary_value) / ref.boundary_value < 1e-2);
}

TEST_CASE("radial oracle at p = 2 reproduces the Bessel value") {
  CHECK(oracle::radial_shooting(2.0, 1.0, 1.0).J == doctest::Approx(oracle::linear_disk_J(1.0)).epsilon(1e-8));
}

TEST_CASE("p = 2 scaling: u is linear in f") {
  const DomainMesh m = build_disk_mesh(1.0, 32, 5);
  std::vector<double> fv(32, 0.0);
  for (int c = 0; c < 8; ++c) fv[c] = 1.0;
  const SolveResult a = solve(m, make_load(m, fv), SolveConfig{});
  for (double& x : fv) x *= 3.0;
  const SolveResult b = solve(m, make_load(m, fv), SolveConfig{});
  CHECK(b.report.J == doctest::Approx(9.0 * a.report.J).epsilon(1e-9));
}

TEST_CASE("homogeneity for general p: J(c f) = c^{p'} J(f)") {
  const DomainMesh m = build_disk_mesh(1.0, 32, 5);
  std::vector<double> fv(32, 0.0);
  for (int c = 0; c < 12; ++c) fv[c] = 1.0;
  for (double p : {1.5, 3.0}) {
    SolveConfig cfg;
    cfg.p = p;
    const SolveResult a = solve(m, make_load(m, fv), cfg);
    auto g = fv;
    for (double& x : g) x *= 2.0;
    const SolveResult b = solve(m, make_load(m, g), cfg);
    CHECK(b.report.J == doctest::Approx(std::pow(2.0, p / (p - 1.0)) * a.report.J).epsilon(1e-6));
  }
}

TEST_CASE("duality and energy descent") {
  const DomainMesh& m = disk64();
  std::vector<double> fv(64, -0.2);
  for (int c = 10; c < 30; ++c) fv[c] = 1.5;
  for (double p : {1.5, 2.0, 3.0}) {
    SolveConfig cfg;
    cfg.p = p;
    const SolveResult r = solve(m, make_load(m, fv), cfg);
    REQUIRE(r.report.converged);
    CHECK(r.report.duality_gap <= 1e-6 * (1.0 + std::abs(r.report.J)));
    CHECK(r.report.residual_norm <= cfg.newton_tol);
    for (const auto& st : r.report.stages) {
      for (std::size_t k = 1; k < st.energy.size(); ++k) {
        CHECK(st.energy[k] <= st.energy[k - 1] + 1e-11 * (1.0 + std::abs(st.energy[k - 1])));
      }
    }
  }
}

TEST_CASE("functional I: zero, suboptimal field, maximality") {
  const DomainMesh m = build_disk_mesh(1.0, 32, 5);
  const LoadField zero = constant_load(m, 0.0);
  CHECK(functional_I(m, constant_state(m, 0.0, 2.0), zero, 2.0) == 0.0);
  CHECK(functional_I(m, constant_state(m, 1.0, 2.0), zero, 2.0) == doctest::Approx(-m.area()).epsilon(1e-12));

  std::vector<double> fv(32, 0.0);
  for (int c = 0; c < 10; ++c) fv[c] = 1.0;
  const LoadField f = make_load(m, fv);
  for (double p : {1.5, 3.0}) {
    SolveConfig cfg;
    cfg.p = p;
    const SolveResult r = solve(m, f, cfg);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N(0.0, 0.3);
    for (int k = 0; k < 20; ++k) {
      auto u = r.state.nodal_values;
      for (double& x : u) x += N(rng);
      CHECK(functional_I(m, make_state(m, u, p, 0.0), f, p) <= r.report.I + 1e-9);
    }
  }
}

TEST_CASE("mid-cell breakpoints use the exact load vector") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  const double L = m.total_boundary_length();
  // One piece covering the whole curve equals the constant load.
  const PiecewiseLoad whole({0.3 * L / 16.0, 0.3 * L / 16.0 + 0.5 * L}, {2.0, 2.0}, L);
  const Eigen::VectorXd a = assemble_load_vector(m, whole);
  const Eigen::VectorXd b = assemble_load_vector(m, PiecewiseLoad::from_cells(m, constant_load(m, 2.0)));
  CHECK((a - b).norm() < 1e-13);
  CHECK(a.sum() == doctest::Approx(2.0 * L).epsilon(1e-13));
}

TEST_CASE("config validation") {
  SolveConfig c;
  c.p = 0.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c.p = 10.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c.p = 2.0;
  c.eps_final = 0.5;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("mesh mismatch is rejected") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  CHECK_THROWS_AS(make_load(m, std::vector<double>(15, 1.0)), Error);
  CHECK_THROWS_AS(make_load(m, std::vector<double>(16, NAN)), Error);
}
