#include "plap/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

DomainMesh::DomainMesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
                       std::vector<int> boundary_loop)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_loop_(std::move(boundary_loop)) {
  const int nv = static_cast<int>(vertices_.size());
  auto check_index = [nv](int i, const char* what) {
    if (i < 0 || i >= nv) {
      throw Error(ErrorCode::mesh_invalid,
                  std::string(what) + " references vertex " + std::to_string(i) +
                      " out of range [0," + std::to_string(nv) + ")");
    }
  };
  areas_.reserve(triangles_.size());
  for (const auto& t : triangles_) {
    for (int i : t) check_index(i, "triangle");
    areas_.push_back(signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]));
  }
  for (int i : boundary_loop_) check_index(i, "boundary loop");

  const std::size_t nb = boundary_loop_.size();
  cells_.reserve(nb);
  double s = 0.0;
  for (std::size_t c = 0; c < nb; ++c) {
    BoundaryCell cell;
    cell.v0 = boundary_loop_[c];
    cell.v1 = boundary_loop_[(c + 1) % nb];
    const Point a = vertices_[cell.v0];
    const Point b = vertices_[cell.v1];
    const Point d = b - a;
    cell.weight = d.norm();
    cell.s_begin = s;
    cell.midpoint = 0.5 * (a + b);
    if (cell.weight > 0.0) cell.tangent = d / cell.weight;
    // Counter-clockwise loop: the interior is on the left, so the outward
    // normal is the tangent rotated clockwise.
    cell.normal = Point(cell.tangent.y(), -cell.tangent.x());
    s += cell.weight;
    cells_.push_back(cell);
  }
  length_ = s;
}

double DomainMesh::area() const {
  double a = 0.0;
  for (double t : areas_) a += t;
  return a;
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "ok";
  std::ostringstream os;
  os << violations.size() << " violation(s); first: " << violations.front().invariant << " at "
     << violations.front().location << " (" << violations.front().detail << ")";
  return os.str();
}

ValidationReport validate_mesh(const DomainMesh& mesh) {
  ValidationReport report;
  auto add = [&report](std::string inv, std::string loc, std::string detail) {
    report.violations.push_back({std::move(inv), std::move(loc), std::move(detail)});
  };

  const auto& areas = mesh.triangle_areas();
  for (std::size_t t = 0; t < areas.size(); ++t) {
    if (!(areas[t] > 0.0)) {
      std::ostringstream d;
      d << "signed area " << areas[t];
      add("positive_area", "triangle " + std::to_string(t), d.str());
    }
  }

  // Edge multiplicities, keyed by the directed edge as it appears in a
  // counter-clockwise triangle.
  std::map<std::pair<int, int>, int> undirected;
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      undirected[{std::min(a, b), std::max(a, b)}] += 1;
      directed[{a, b}] += 1;
    }
  }
  for (const auto& [edge, count] : undirected) {
    if (count > 2) {
      add("boundary_loop", "edge " + std::to_string(edge.first) + "-" + std::to_string(edge.second),
          "edge shared by " + std::to_string(count) + " triangles");
    }
  }

  const auto& loop = mesh.boundary_loop();
  const std::size_t nb = loop.size();
  if (nb < 3) {
    add("boundary_loop", "loop", "fewer than 3 boundary vertices");
  } else {
    std::vector<int> sorted(loop);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      add("boundary_loop", "loop", "boundary loop visits a vertex twice");
    }
    std::size_t boundary_edges = 0;
    for (const auto& [edge, count] : undirected) {
      if (count == 1) ++boundary_edges;
    }
    if (boundary_edges != nb) {
      add("boundary_loop", "loop",
          "mesh has " + std::to_string(boundary_edges) + " boundary edges but loop has " +
              std::to_string(nb));
    }
    for (std::size_t c = 0; c < nb; ++c) {
      const int a = loop[c];
      const int b = loop[(c + 1) % nb];
      auto it = undirected.find({std::min(a, b), std::max(a, b)});
      if (it == undirected.end() || it->second != 1) {
        add("boundary_loop", "cell " + std::to_string(c),
            "loop edge is not a boundary edge of exactly one triangle");
      } else if (directed.find({a, b}) == directed.end()) {
        add("boundary_loop", "cell " + std::to_string(c),
            "loop edge orientation is clockwise with respect to its triangle");
      }
    }
  }

  const auto& cells = mesh.boundary_cells();
  if (!cells.empty()) {
    const double h = mesh.total_boundary_length() / static_cast<double>(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      if (std::abs(cell.weight - h) > kEqualArclengthTol * h) {
        std::ostringstream d;
        d.precision(17);
        d << "weight " << cell.weight << " vs L/n_b " << h;
        add("equal_arclength", "cell " + std::to_string(c), d.str());
      }
      const double dot = cell.tangent.dot(cell.normal);
      if (std::abs(dot) > kFrameTol || std::abs(cell.tangent.norm() - 1.0) > kFrameTol ||
          std::abs(cell.normal.norm() - 1.0) > kFrameTol) {
        add("frame", "cell " + std::to_string(c), "tangent/normal not orthonormal");
      }
    }
  }
  return report;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::parameter_out_of_range, msg);
}

void require_valid(const DomainMesh& mesh, const char* who) {
  const auto report = validate_mesh(mesh);
  if (!report.ok()) {
    throw Error(ErrorCode::mesh_invalid, std::string(who) + ": " + report.summary());
  }
}

struct RingNode {
  int id;
  double angle;
};

// Triangulates the strip between two node chains ordered by increasing angle,
// advancing on whichever chain has the smaller next angle.
void stitch(const std::vector<RingNode>& inner, const std::vector<RingNode>& outer,
            std::vector<Triangle>& out) {
  std::size_t i = 0;
  std::size_t k = 0;
  while (i + 1 < inner.size() || k + 1 < outer.size()) {
    const bool inner_done = i + 1 >= inner.size();
    const bool outer_done = k + 1 >= outer.size();
    bool advance_outer;
    if (inner_done) {
      advance_outer = true;
    } else if (outer_done) {
      advance_outer = false;
    } else {
      advance_outer = outer[k + 1].angle <= inner[i + 1].angle;
    }
    if (advance_outer) {
      out.push_back({inner[i].id, outer[k].id, outer[k + 1].id});
      ++k;
    } else {
      out.push_back({inner[i].id, outer[k].id, inner[i + 1].id});
      ++i;
    }
  }
}

}  // namespace

int default_radial_count(int n_boundary) {
  return std::max(2, static_cast<int>(std::lround(n_boundary / 6.4)));
}

DomainMesh build_disk_mesh(double radius, int n_boundary, int n_radial) {
  require(radius > 0.0 && std::isfinite(radius), "build_disk_mesh: radius must be positive");
  require(n_boundary >= 8, "build_disk_mesh: n_boundary must be >= 8");
  require(n_radial >= 2, "build_disk_mesh: n_radial must be >= 2");
  using std::numbers::pi;

  // Ring node counts: even, nondecreasing, at least 4; outer ring = n_boundary.
  std::vector<int> count(n_radial + 1, 1);
  for (int j = 1; j < n_radial; ++j) {
    const double target = static_cast<double>(n_boundary) * j / n_radial;
    count[j] = std::max(4, 2 * static_cast<int>(std::lround(target / 2.0)));
    count[j] = std::max(count[j], count[j - 1]);
  }
  count[n_radial] = n_boundary;
  for (int j = n_radial - 1; j >= 1; --j) count[j] = std::min(count[j], count[j + 1] - count[j + 1] % 2);

  std::vector<int> offset(n_radial + 2, 0);
  for (int j = 0; j <= n_radial; ++j) offset[j + 1] = offset[j] + count[j];

  std::vector<Point> vertices(offset[n_radial + 1]);
  vertices[0] = Point(0.0, 0.0);
  for (int j = 1; j <= n_radial; ++j) {
    const double r = radius * j / n_radial;
    const int m = count[j];
    for (int i = 0; i < m; ++i) {
      const bool mirrored = (m % 2 == 0) && (2 * i > m);
      Point x;
      if (mirrored) {
        const Point& src = vertices[offset[j] + (m - i)];
        x = Point(src.x(), -src.y());
      } else if (i == 0) {
        x = Point(r, 0.0);
      } else if (2 * i == m) {
        x = Point(-r, 0.0);
      } else {
        const double a = 2.0 * pi * i / m;
        x = Point(r * std::cos(a), r * std::sin(a));
      }
      vertices[offset[j] + i] = x;
    }
  }

  const bool symmetric = n_boundary % 2 == 0;
  // Chain of ring-j nodes from angle 0 up to angle `span` inclusive.
  auto chain = [&](int j, double span) {
    std::vector<RingNode> nodes;
    if (j == 0) {
      nodes.push_back({0, 0.0});
      return nodes;
    }
    const int m = count[j];
    const int last = static_cast<int>(std::lround(span / (2.0 * pi) * m));
    for (int i = 0; i <= last; ++i) {
      nodes.push_back({offset[j] + (i % m), 2.0 * pi * i / m});
    }
    return nodes;
  };

  std::vector<Triangle> triangles;
  const double span = symmetric ? pi : 2.0 * pi;
  for (int j = 0; j < n_radial; ++j) {
    std::vector<RingNode> inner = chain(j, span);
    std::vector<RingNode> outer = chain(j + 1, span);
    if (j == 0) {
      // Fan around the center.
      for (std::size_t k = 0; k + 1 < outer.size(); ++k) {
        triangles.push_back({0, outer[k].id, outer[k + 1].id});
      }
    } else {
      stitch(inner, outer, triangles);
    }
  }
  if (symmetric) {
    auto mirror = [&](int v) {
      if (v == 0) return 0;
      int j = 1;
      while (v >= offset[j + 1]) ++j;
      const int m = count[j];
      const int i = v - offset[j];
      return offset[j] + (m - i) % m;
    };
    const std::size_t upper = triangles.size();
    for (std::size_t t = 0; t < upper; ++t) {
      const auto& tri = triangles[t];
      triangles.push_back({mirror(tri[0]), mirror(tri[2]), mirror(tri[1])});
    }
  }

  std::vector<int> loop(n_boundary);
  for (int i = 0; i < n_boundary; ++i) loop[i] = offset[n_radial] + i;

  DomainMesh mesh(std::move(vertices), std::move(triangles), std::move(loop));
  require_valid(mesh, "build_disk_mesh");
  return mesh;
}

DomainMesh build_square_mesh(double side, int n_per_side) {
  require(side > 0.0 && std::isfinite(side), "build_square_mesh: side must be positive");
  require(n_per_side >= 2, "build_square_mesh: n_per_side must be >= 2");
  const int n = n_per_side;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.emplace_back(side * i / n, side * j / n);
    }
  }
  std::vector<Triangle> triangles;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  std::vector<int> loop;
  for (int i = 0; i < n; ++i) loop.push_back(id(i, 0));
  for (int j = 0; j < n; ++j) loop.push_back(id(n, j));
  for (int i = n; i > 0; --i) loop.push_back(id(i, n));
  for (int j = n; j > 0; --j) loop.push_back(id(0, j));

  DomainMesh mesh(std::move(vertices), std::move(triangles), std::move(loop));
  require_valid(mesh, "build_square_mesh");
  return mesh;
}

ArclengthChart::ArclengthChart(const DomainMesh& mesh) {
  const auto& cells = mesh.boundary_cells();
  const auto& v = mesh.vertices();
  for (const auto& c : cells) {
    start_.push_back(v[c.v0]);
    end_.push_back(v[c.v1]);
    s_begin_.push_back(c.s_begin);
    weights_.push_back(c.weight);
  }
  length_ = mesh.total_boundary_length();
  const double h = cells.empty() ? 0.0 : length_ / static_cast<double>(cells.size());
  for (double w : weights_) {
    if (std::abs(w - h) > kEqualArclengthTol * h) equal_ = false;
  }
}

double ArclengthChart::wrap(double s) const {
  double r = std::fmod(s, length_);
  if (r < 0.0) r += length_;
  if (r >= length_) r = 0.0;
  return r;
}

std::size_t ArclengthChart::cell_of(double s) const {
  const double w = wrap(s);
  const std::size_t n = s_begin_.size();
  if (equal_) {
    auto c = static_cast<std::size_t>(w / (length_ / static_cast<double>(n)));
    if (c >= n) c = n - 1;
    // Guard against rounding at cell ends.
    while (c > 0 && w < s_begin_[c]) --c;
    while (c + 1 < n && w >= s_begin_[c + 1]) ++c;
    return c;
  }
  auto it = std::upper_bound(s_begin_.begin(), s_begin_.end(), w);
  return static_cast<std::size_t>(std::distance(s_begin_.begin(), it)) - 1;
}

double ArclengthChart::local_coordinate(std::size_t cell, double s_wrapped) const {
  return std::clamp((s_wrapped - s_begin_[cell]) / weights_[cell], 0.0, 1.0);
}

Point ArclengthChart::point(double s) const {
  const double w = wrap(s);
  const std::size_t c = cell_of(w);
  const double xi = local_coordinate(c, w);
  return (1.0 - xi) * start_[c] + xi * end_[c];
}

double ArclengthChart::arclength_of(const Point& x) const {
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t c = 0; c < start_.size(); ++c) {
    const Point d = end_[c] - start_[c];
    const double xi = std::clamp((x - start_[c]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    const double dist = (start_[c] + xi * d - x).norm();
    if (dist < best_d) {
      best_d = dist;
      best_s = s_begin_[c] + xi * weights_[c];
    }
  }
  return wrap(best_s);
}

std::optional<DiskGeometry> detect_disk(const DomainMesh& mesh, double rel_tol) {
  const auto& loop = mesh.boundary_loop();
  if (loop.size() < 3) return std::nullopt;
  Point c = Point::Zero();
  for (int i : loop) c += mesh.vertices()[i];
  c /= static_cast<double>(loop.size());
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  for (int i : loop) {
    const double r = (mesh.vertices()[i] - c).norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (!(rmax > 0.0) || (rmax - rmin) > rel_tol * rmax) return std::nullopt;
  const Point d0 = mesh.vertices()[loop[0]] - c;
  return DiskGeometry{c, 0.5 * (rmin + rmax), std::atan2(d0.y(), d0.x())};
}

}  // namespace plap
