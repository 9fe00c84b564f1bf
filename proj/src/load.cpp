#include "plap/load.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plap/error.hpp"

namespace plap {

void check_same_mesh(const DomainMesh& mesh, const LoadField& f) {
  if (f.values.size() != mesh.num_boundary_cells()) {
    throw Error(ErrorCode::mesh_mismatch, "load has " + std::to_string(f.values.size()) +
                                              " values but mesh has " +
                                              std::to_string(mesh.num_boundary_cells()) +
                                              " boundary cells");
  }
}

LoadField make_load(const DomainMesh& mesh, std::vector<double> values) {
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (!std::isfinite(values[c])) {
      throw Error(ErrorCode::load_invalid, "load value at cell " + std::to_string(c) + " is not finite");
    }
  }
  const double w = mesh.num_boundary_cells() == 0
                       ? 0.0
                       : mesh.total_boundary_length() / static_cast<double>(mesh.num_boundary_cells());
  LoadField f(std::move(values), w);
  check_same_mesh(mesh, f);
  return f;
}

LoadField constant_load(const DomainMesh& mesh, double value) {
  return make_load(mesh, std::vector<double>(mesh.num_boundary_cells(), value));
}

PiecewiseLoad::PiecewiseLoad(std::vector<double> breaks, std::vector<double> values, double period)
    : breaks_(std::move(breaks)), values_(std::move(values)), period_(period) {
  if (breaks_.size() != values_.size() || breaks_.empty()) {
    throw Error(ErrorCode::load_invalid, "piecewise load needs one breakpoint per piece");
  }
  if (!(period_ > 0.0)) throw Error(ErrorCode::load_invalid, "piecewise load period must be positive");
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    if (breaks_[k + 1] < breaks_[k]) {
      throw Error(ErrorCode::load_invalid, "piecewise load breakpoints must be nondecreasing");
    }
  }
  if (breaks_.back() > breaks_.front() + period_) {
    throw Error(ErrorCode::load_invalid, "piecewise load breakpoints span more than one period");
  }
}

PiecewiseLoad PiecewiseLoad::from_cells(const DomainMesh& mesh, const LoadField& f) {
  check_same_mesh(mesh, f);
  std::vector<double> breaks;
  breaks.reserve(f.size());
  for (const auto& c : mesh.boundary_cells()) breaks.push_back(c.s_begin);
  return PiecewiseLoad(std::move(breaks), f.values, mesh.total_boundary_length());
}

double PiecewiseLoad::piece_end(std::size_t k) const {
  return k + 1 < breaks_.size() ? breaks_[k + 1] : breaks_[0] + period_;
}

double PiecewiseLoad::operator()(double s) const {
  // Shift s into [breaks[0], breaks[0] + L).
  double x = std::fmod(s - breaks_[0], period_);
  if (x < 0.0) x += period_;
  x += breaks_[0];
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const auto k = static_cast<std::size_t>(std::distance(breaks_.begin(), it));
  return values_[k == 0 ? values_.size() - 1 : k - 1];
}

double lq_distance(const PiecewiseLoad& a, const PiecewiseLoad& b, double q) {
  const double L = a.period();
  auto wrap = [L](double s) {
    double r = std::fmod(s, L);
    if (r < 0.0) r += L;
    return r;
  };
  std::vector<double> pts{0.0, L};
  for (double s : a.breaks()) pts.push_back(wrap(s));
  for (double s : b.breaks()) pts.push_back(wrap(s));
  std::sort(pts.begin(), pts.end());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double len = pts[k + 1] - pts[k];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (pts[k] + pts[k + 1]);
    acc += std::pow(std::abs(a(mid) - b(mid)), q) * len;
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace plap
