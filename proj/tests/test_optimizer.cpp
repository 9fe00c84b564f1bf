#include <doctest.h>

#include "plap/optimizer.hpp"
#include "plap_verify/acceptance.hpp"
#include "plap_verify/oracles.hpp"

using namespace plap;

namespace {

void check_ascent(const OptimizeResult& r) {
  for (const auto& o : r.restarts) {
    const auto& rec = o.history.records;
    for (std::size_t k = 1; k < rec.size(); ++k) {
      CHECK(rec[k].J >= rec[k - 1].J - 1e-5 * (1.0 + std::abs(rec[k - 1].J)));
    }
  }
}

}  // namespace

TEST_CASE("constant load is a singleton class") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  OptimizeConfig cfg;
  cfg.n_restarts = 3;
  const OptimizeResult r = maximize_over_rearrangements(m, constant_load(m, 1.5), cfg);
  REQUIRE(r.restarts.size() == 1);
  CHECK(r.restarts[0].stop == StopReason::singleton);
  CHECK(r.restarts[0].history.records.size() == 1);
  CHECK(r.f_hat == constant_load(m, 1.5));
}

TEST_CASE("evaluate_candidate on the zero load") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  const Evaluation e = evaluate_candidate(m, constant_load(m, 0.0), SolveConfig{});
  CHECK(e.J == 0.0);
  CHECK(e.gap <= 1e-6);
}

TEST_CASE("binary load beats random sampling and ends comonotone") {
  const DomainMesh m = build_disk_mesh(1.0, 32, 5);
  std::vector<double> v(32, 0.0);
  for (int c = 0; c < 32; c += 4) v[c] = 1.0;
  const LoadField f0 = make_load(m, v);
  OptimizeConfig cfg;
  cfg.n_restarts = 2;
  cfg.seed = 9;
  const OptimizeResult r = maximize_over_rearrangements(m, f0, cfg);
  CHECK(same_class(r.f_hat, f0));
  CHECK(r.eval.defect == 0.0);
  CHECK(r.eval.gap <= 1e-6 * (1.0 + r.eval.J));
  CHECK(r.eval.J >= r.restarts[0].history.records.front().J);
  CHECK(r.eval.J >= oracle::random_sampling_max_J(m, f0, cfg.solve, 50, 3));
  check_ascent(r);
  for (const auto& o : r.restarts) CHECK(same_class(o.final_load, f0));
}

TEST_CASE("tiny mesh: optimizer finds the exhaustive maximum") {
  const DomainMesh m = build_disk_mesh(1.0, 8, 2);
  const LoadField f0 = make_load(m, {0, 0, 0, 1, 1, 1, 2, 2});
  for (double p : {2.0, 3.0}) {
    OptimizeConfig cfg;
    cfg.n_restarts = 5;
    cfg.seed = 1;
    cfg.solve.p = p;
    const OptimizeResult r = maximize_over_rearrangements(m, f0, cfg);
    const auto ex = oracle::exhaustive_max_J(m, f0, cfg.solve);
    CHECK(ex.count == 560);
    CHECK(r.eval.J == doctest::Approx(ex.J).epsilon(1e-6));
    check_ascent(r);
  }
}

TEST_CASE("restarts are reproducible from the seed") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  const LoadField f0 = acceptance::step_load(m, 0, 5);
  CHECK(random_rearrangement(f0, 42, 1) == random_rearrangement(f0, 42, 1));
  CHECK_FALSE(random_rearrangement(f0, 42, 1) == random_rearrangement(f0, 42, 2));
  OptimizeConfig cfg;
  cfg.n_restarts = 3;
  cfg.seed = 42;
  const OptimizeResult a = maximize_over_rearrangements(m, f0, cfg);
  const OptimizeResult b = maximize_over_rearrangements(m, f0, cfg);
  REQUIRE(a.restarts.size() == b.restarts.size());
  for (std::size_t i = 0; i < a.restarts.size(); ++i) {
    CHECK(a.restarts[i].J == b.restarts[i].J);
    CHECK(a.restarts[i].final_load == b.restarts[i].final_load);
  }
}

TEST_CASE("without the neighbour search the iteration stops at a best-response fixed point") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  OptimizeConfig cfg;
  cfg.neighbour_budget = 0;
  const OptimizeResult r = maximize_over_rearrangements(m, acceptance::step_load(m, 3, 5), cfg);
  CHECK(r.restarts[0].stop == StopReason::fixed_point);
  CHECK(r.eval.defect == 0.0);
  for (const auto& rec : r.history().records) CHECK(rec.move != Move::neighbour);
}

TEST_CASE("optimizer config validation") {
  OptimizeConfig cfg;
  cfg.max_outer_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.max_outer_iters = 1;
  cfg.J_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
