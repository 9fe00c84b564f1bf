#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace plap {

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

struct BoundaryCell {
  int v0 = 0;  // start vertex (in loop orientation)
  int v1 = 0;  // end vertex
  double weight = 0.0;  // arclength
  double s_begin = 0.0;  // arclength coordinate of v0
  Point midpoint = Point::Zero();
  Point tangent = Point::Zero();  // unit, v0 -> v1
  Point normal = Point::Zero();  // unit, outward
};

/// Triangulated planar domain with a single counter-clockwise boundary loop.
///
/// Immutable once constructed. The constructor derives boundary cells and
/// triangle areas but does not enforce the invariants; run validate_mesh (the
/// builders and the file reader do) before handing a mesh to a solver.
class DomainMesh {
 public:
  DomainMesh() = default;
  DomainMesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
             std::vector<int> boundary_loop);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<int>& boundary_loop() const { return boundary_loop_; }
  const std::vector<BoundaryCell>& boundary_cells() const { return cells_; }
  const std::vector<double>& triangle_areas() const { return areas_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_boundary_cells() const { return cells_.size(); }
  double total_boundary_length() const { return length_; }
  double area() const;

 private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> boundary_loop_;
  std::vector<BoundaryCell> cells_;
  std::vector<double> areas_;  // signed
  double length_ = 0.0;
};

double signed_area(const Point& a, const Point& b, const Point& c);

struct MeshViolation {
  std::string invariant;  // "positive_area", "boundary_loop", "equal_arclength", "frame"
  std::string location;  // e.g. "triangle 17", "cell 3"
  std::string detail;
};

struct ValidationReport {
  std::vector<MeshViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

inline constexpr double kEqualArclengthTol = 1e-12;
inline constexpr double kFrameTol = 1e-12;

ValidationReport validate_mesh(const DomainMesh& mesh);

/// Structured disk triangulation: concentric rings of even node counts,
/// built on the upper half-disk and mirrored, so the mesh is exactly
/// symmetric under y -> -y. Boundary vertex k sits at angle 2*pi*k/n_boundary.
/// Odd n_boundary falls back to full-circle stitching (no mirror symmetry).
DomainMesh build_disk_mesh(double radius, int n_boundary, int n_radial);

/// Uniform (n+1)x(n+1) grid on [0,side]^2, each square split along its
/// main diagonal. Boundary loop starts at the origin.
DomainMesh build_square_mesh(double side, int n_per_side);

/// Default ring count used by the CLI and tests for a disk with n boundary
/// cells (64 -> 10, 128 -> 20).
int default_radial_count(int n_boundary);

/// Periodic arclength parametrization of the boundary loop.
class ArclengthChart {
 public:
  explicit ArclengthChart(const DomainMesh& mesh);

  double length() const { return length_; }
  std::size_t num_cells() const { return s_begin_.size(); }

  /// Wraps s into [0, L).
  double wrap(double s) const;
  /// Cell containing s (after wrapping); cell c covers [s_c, s_{c+1}).
  std::size_t cell_of(double s) const;
  /// Position within the cell in [0,1].
  double local_coordinate(std::size_t cell, double s_wrapped) const;
  Point point(double s) const;
  /// Arclength of the nearest boundary point to x.
  double arclength_of(const Point& x) const;
  double cell_begin(std::size_t cell) const { return s_begin_[cell]; }
  double cell_length(std::size_t cell) const { return weights_[cell]; }

 private:
  std::vector<Point> start_;
  std::vector<Point> end_;
  std::vector<double> s_begin_;
  std::vector<double> weights_;
  double length_ = 0.0;
  bool equal_ = true;
};

struct DiskGeometry {
  Point center;
  double radius;
  double theta0;  // angle of boundary_loop[0] about the center
};

/// Recognizes meshes whose boundary vertices all lie on one circle.
std::optional<DiskGeometry> detect_disk(const DomainMesh& mesh, double rel_tol = 1e-9);

}  // namespace plap
