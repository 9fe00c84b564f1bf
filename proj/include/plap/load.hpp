#pragma once

#include <span>
#include <vector>

#include "plap/geometry2d.hpp"

namespace plap {

/// Piecewise-constant boundary load: one value per boundary cell, all cells of
/// the same arclength `weight`.
struct LoadField {
  std::vector<double> values;
  double weight = 1.0;

  LoadField() = default;
  LoadField(std::vector<double> v, double w) : values(std::move(v)), weight(w) {}

  std::size_t size() const { return values.size(); }
  bool operator==(const LoadField&) const = default;
};

/// Cell-aligned load on `mesh`; throws mesh_mismatch on a length mismatch and
/// load_invalid on non-finite values.
LoadField make_load(const DomainMesh& mesh, std::vector<double> values);
LoadField constant_load(const DomainMesh& mesh, double value);

/// Throws mesh_mismatch unless `f` has one value per boundary cell of `mesh`.
void check_same_mesh(const DomainMesh& mesh, const LoadField& f);

/// Piecewise-constant function on the periodic arclength chart [0, L) with
/// arbitrary breakpoints. Piece k takes value values[k] on
/// [breaks[k], breaks[k+1]), with breaks[n] := breaks[0] + L. Breakpoints are
/// stored unwrapped and nondecreasing.
class PiecewiseLoad {
 public:
  PiecewiseLoad(std::vector<double> breaks, std::vector<double> values, double period);

  /// Cell-aligned view of a LoadField on `mesh`.
  static PiecewiseLoad from_cells(const DomainMesh& mesh, const LoadField& f);

  std::size_t num_pieces() const { return values_.size(); }
  double period() const { return period_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  double piece_begin(std::size_t k) const { return breaks_[k]; }
  double piece_end(std::size_t k) const;

  /// Value at arclength s (any real s; periodic).
  double operator()(double s) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
  double period_;
};

/// Exact L^q distance between two piecewise-constant boundary functions with
/// the same period.
double lq_distance(const PiecewiseLoad& a, const PiecewiseLoad& b, double q);

}  // namespace plap
