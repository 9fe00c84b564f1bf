#include <doctest.h>

#include <cmath>
#include <numbers>

#include "plap/error.hpp"
#include "plap/geometry2d.hpp"

using namespace plap;

TEST_CASE("disk mesh: equal cells and octagon perimeter") {
  const DomainMesh m = build_disk_mesh(1.0, 64, 10);
  CHECK(m.num_boundary_cells() == 64);
  CHECK(validate_mesh(m).ok());
  const double w = m.total_boundary_length() / 64.0;
  for (const auto& c : m.boundary_cells()) CHECK(c.weight == doctest::Approx(w).epsilon(1e-13));

  const DomainMesh oct = build_disk_mesh(1.0, 8, 2);
  CHECK(oct.total_boundary_length() == doctest::Approx(16.0 * std::sin(std::numbers::pi / 8)).epsilon(1e-14));
  CHECK(oct.total_boundary_length() == doctest::Approx(6.1229349).epsilon(1e-7));
}

TEST_CASE("disk mesh: area deficit and similarity") {
  const DomainMesh m = build_disk_mesh(1.0, 64, 10);
  CHECK(std::abs(m.area() - std::numbers::pi) / std::numbers::pi < 5e-3);
  const DomainMesh big = build_disk_mesh(2.0, 64, 10);
  REQUIRE(big.num_vertices() == m.num_vertices());
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    CHECK((big.vertices()[i] - 2.0 * m.vertices()[i]).norm() < 1e-14);
  }
}

TEST_CASE("disk mesh is mirror symmetric") {
  const DomainMesh m = build_disk_mesh(1.0, 32, 5);
  const auto& loop = m.boundary_loop();
  const std::size_t n = loop.size();
  for (std::size_t k = 1; k < n; ++k) {
    const Point a = m.vertices()[loop[k]];
    const Point b = m.vertices()[loop[n - k]];
    CHECK(std::abs(a.x() - b.x()) < 1e-15);
    CHECK(std::abs(a.y() + b.y()) < 1e-15);
  }
  CHECK(default_radial_count(64) == 10);
  CHECK(default_radial_count(128) == 20);
}

TEST_CASE("odd disk mesh is still valid") {
  CHECK(validate_mesh(build_disk_mesh(1.0, 33, 5)).ok());
}

TEST_CASE("square mesh examples") {
  const DomainMesh a = build_square_mesh(1.0, 4);
  CHECK(a.num_boundary_cells() == 16);
  for (const auto& c : a.boundary_cells()) CHECK(c.weight == doctest::Approx(0.25));
  const DomainMesh b = build_square_mesh(1.0, 2);
  CHECK(b.num_boundary_cells() == 8);
  CHECK(b.num_vertices() == 9);
  CHECK(validate_mesh(b).ok());
  const DomainMesh c = build_square_mesh(3.0, 3);
  CHECK(c.boundary_cells()[0].weight == doctest::Approx(1.0));
}

TEST_CASE("builders reject bad parameters") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::acceptance_failure;
  };
  CHECK(code_of([] { build_disk_mesh(1.0, 4, 2); }) == ErrorCode::parameter_out_of_range);
  CHECK(code_of([] { build_disk_mesh(-1.0, 16, 2); }) == ErrorCode::parameter_out_of_range);
  CHECK(code_of([] { build_square_mesh(1.0, 1); }) == ErrorCode::parameter_out_of_range);
}

TEST_CASE("validate_mesh flags a flipped triangle") {
  const DomainMesh m = build_square_mesh(1.0, 2);
  auto tris = m.triangles();
  std::swap(tris[3][1], tris[3][2]);
  const DomainMesh bad(m.vertices(), tris, m.boundary_loop());
  const auto report = validate_mesh(bad);
  REQUIRE_FALSE(report.ok());
  bool named = false;
  for (const auto& v : report.violations) named = named || (v.invariant == "positive_area" && v.location == "triangle 3");
  CHECK(named);
}

TEST_CASE("validate_mesh flags unequal boundary cells") {
  const DomainMesh m = build_square_mesh(1.0, 2);
  auto verts = m.vertices();
  // Move the midpoint of the bottom edge.
  for (auto& v : verts) {
    if (std::abs(v.y()) < 1e-15 && std::abs(v.x() - 0.5) < 1e-15) v.x() = 0.4;
  }
  const DomainMesh bad(verts, m.triangles(), m.boundary_loop());
  const auto report = validate_mesh(bad);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations) found = found || v.invariant == "equal_arclength";
  CHECK(found);
}

TEST_CASE("arclength chart round trip") {
  const DomainMesh m = build_disk_mesh(1.0, 16, 3);
  const ArclengthChart chart(m);
  CHECK(chart.length() == doctest::Approx(m.total_boundary_length()));
  for (double s : {0.0, 0.1, 1.3, 2.9, 5.0, 6.0}) {
    const double w = chart.wrap(s);
    CHECK(chart.arclength_of(chart.point(w)) == doctest::Approx(w).epsilon(1e-12));
  }
  CHECK(chart.wrap(-0.1) == doctest::Approx(chart.length() - 0.1));
  CHECK(chart.cell_of(chart.cell_begin(5) + 1e-9) == 5);
}

TEST_CASE("detect_disk") {
  const auto d = detect_disk(build_disk_mesh(2.5, 32, 5));
  REQUIRE(d.has_value());
  CHECK(d->radius == doctest::Approx(2.5));
  CHECK_FALSE(detect_disk(build_square_mesh(1.0, 4)).has_value());
}
