#include <cmath>
#include <iostream>
#include <numbers>

#include <Eigen/SparseCholesky>

#include "plap/error.hpp"
#include "plap/perturbation.hpp"

namespace plap {

double collar_cutoff(double distance, double delta) {
  if (distance <= 0.0) return 1.0;
  if (distance >= delta) return 0.0;
  const double x = distance / delta;
  return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double collar_cutoff_derivative(double distance, double delta) {
  if (distance <= 0.0 || distance >= delta) return 0.0;
  const double x = distance / delta;
  return -30.0 * x * x * (1.0 - x) * (1.0 - x) / delta;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class DiskExtension final : public VelocityExtension {
 public:
  DiskExtension(const DiskGeometry& disk, double L, TangentField v, double collar_fraction)
      : disk_(disk), L_(L), v_(std::move(v)), delta_(collar_fraction * disk.radius) {
    if (!(collar_fraction > 0.0 && collar_fraction <= 1.0)) {
      throw Error(ErrorCode::parameter_out_of_range, "collar fraction must lie in (0, 1]");
    }
  }

  Eigen::Vector2d value(const Point& x) const override {
    const Point d = x - disk_.center;
    const double r = d.norm();
    const double eta = collar_cutoff(disk_.radius - r, delta_);
    if (eta == 0.0) return Eigen::Vector2d::Zero();
    const double g = eta * omega(arclength(d));
    return g * Eigen::Vector2d(-d.y(), d.x());
  }

  Eigen::Matrix2d jacobian(const Point& x) const override {
    const Point d = x - disk_.center;
    const double r = d.norm();
    const double dist = disk_.radius - r;
    const double eta = collar_cutoff(dist, delta_);
    const double deta = collar_cutoff_derivative(dist, delta_);
    if (eta == 0.0 && deta == 0.0) return Eigen::Matrix2d::Zero();
    const double s = arclength(d);
    const double w = omega(s);
    const double dw = v_.derivative(s);  // d omega / d theta
    const double r2 = r * r;
    const double g = eta * w;
    const double gx = -deta * w * d.x() / r - eta * dw * d.y() / r2;
    const double gy = -deta * w * d.y() / r + eta * dw * d.x() / r2;
    Eigen::Matrix2d J;
    J << -d.y() * gx, -g - d.y() * gy, g + d.x() * gx, d.x() * gy;
    return J;
  }

  double divergence(const Point& x) const override {
    const Point d = x - disk_.center;
    const double eta = collar_cutoff(disk_.radius - d.norm(), delta_);
    if (eta == 0.0) return 0.0;
    return eta * v_.derivative(arclength(d));
  }

  bool analytic() const override { return true; }

 private:
  double arclength(const Point& d) const {
    return L_ * (std::atan2(d.y(), d.x()) - disk_.theta0) / kTwoPi;
  }
  double omega(double s) const { return kTwoPi / L_ * v_.value(s); }

  DiskGeometry disk_;
  double L_;
  TangentField v_;
  double delta_;
};

class ProjectedExtension final : public VelocityExtension {
 public:
  ProjectedExtension(const DomainMesh& mesh, TangentField v, double collar_fraction)
      : chart_(mesh), v_(std::move(v)) {
    tangents_.reserve(mesh.num_boundary_cells());
    for (const auto& c : mesh.boundary_cells()) tangents_.push_back(c.tangent);
    delta_ = collar_fraction * std::sqrt(mesh.area() / std::numbers::pi);
    step_ = 1e-6 * std::sqrt(mesh.area());
  }

  Eigen::Vector2d value(const Point& x) const override {
    const double s = chart_.arclength_of(x);
    const double dist = (chart_.point(s) - x).norm();
    const double eta = collar_cutoff(dist, delta_);
    if (eta == 0.0) return Eigen::Vector2d::Zero();
    return eta * v_.value(s) * tangents_[chart_.cell_of(s)];
  }

  Eigen::Matrix2d jacobian(const Point& x) const override {
    Eigen::Matrix2d J;
    for (int j = 0; j < 2; ++j) {
      Point e = Point::Zero();
      e[j] = step_;
      J.col(j) = (value(x + e) - value(x - e)) / (2.0 * step_);
    }
    return J;
  }

  bool analytic() const override { return false; }

 private:
  ArclengthChart chart_;
  TangentField v_;
  std::vector<Point> tangents_;
  double delta_;
  double step_;
};

}  // namespace

std::unique_ptr<VelocityExtension> make_disk_extension(const DiskGeometry& disk, double boundary_length,
                                                       const TangentField& v, double collar_fraction) {
  return std::make_unique<DiskExtension>(disk, boundary_length, v, collar_fraction);
}

std::unique_ptr<VelocityExtension> make_extension(const DomainMesh& mesh, const TangentField& v,
                                                  double collar_fraction) {
  if (auto disk = detect_disk(mesh)) {
    return make_disk_extension(*disk, mesh.total_boundary_length(), v, collar_fraction);
  }
  std::cerr << "warning: domain is not a disk; using a projected velocity extension with a "
               "finite-difference Jacobian\n";
  return std::make_unique<ProjectedExtension>(mesh, v, collar_fraction);
}

PeriodicSpline::PeriodicSpline(std::vector<double> values, double offset, double period)
    : y_(std::move(values)), offset_(offset), period_(period) {
  const auto n = static_cast<Eigen::Index>(y_.size());
  if (n < 3) throw Error(ErrorCode::parameter_out_of_range, "periodic spline needs >= 3 nodes");
  h_ = period_ / static_cast<double>(n);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index km = (k + n - 1) % n;
    const Eigen::Index kp = (k + 1) % n;
    trip.emplace_back(k, k, 4.0);
    trip.emplace_back(k, km, 1.0);
    trip.emplace_back(k, kp, 1.0);
    rhs[k] = 6.0 / (h_ * h_) * (y_[km] - 2.0 * y_[k] + y_[kp]);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  const Eigen::VectorXd m = ldlt.solve(rhs);
  m_.assign(m.data(), m.data() + n);
}

std::size_t PeriodicSpline::locate(double s, double& tau) const {
  double x = std::fmod(s - offset_, period_);
  if (x < 0.0) x += period_;
  const std::size_t n = y_.size();
  auto k = static_cast<std::size_t>(x / h_);
  if (k >= n) k = n - 1;
  tau = (x - static_cast<double>(k) * h_) / h_;
  return k;
}

double PeriodicSpline::operator()(double s) const {
  double t = 0.0;
  const std::size_t k = locate(s, t);
  const std::size_t k1 = (k + 1) % y_.size();
  const double a = 1.0 - t;
  return a * y_[k] + t * y_[k1] + h_ * h_ / 6.0 * ((a * a * a - a) * m_[k] + (t * t * t - t) * m_[k1]);
}

double PeriodicSpline::derivative(double s) const {
  double t = 0.0;
  const std::size_t k = locate(s, t);
  const std::size_t k1 = (k + 1) % y_.size();
  const double a = 1.0 - t;
  return (y_[k1] - y_[k]) / h_ + h_ / 6.0 * (-(3.0 * a * a - 1.0) * m_[k] + (3.0 * t * t - 1.0) * m_[k1]);
}

}  // namespace plap
