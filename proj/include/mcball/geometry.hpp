#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcball/matrix.hpp"
#include "mcball/qr.hpp"

namespace mcball {

/// A finite set of points in R^n, stored contiguously one point at a time.
class PointSet {
 public:
  PointSet(std::size_t dim, std::size_t count)
      : dim_(dim), count_(count), coords_(dim * count, 0.0) {
    validate_shape();
  }
  PointSet(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> point(std::size_t i) {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> raw() const { return coords_; }

  double max_abs() const;
  void check_finite() const;

  /// Removes exact coordinate duplicates, keeping first occurrences in order.
  PointSet deduplicated(std::size_t* removed = nullptr) const;

  /// Columns are the selected points: an n x |subset| matrix.
  Matrix gather_columns(std::span<const std::size_t> subset) const;

  std::vector<std::string> labels;  // optional, empty when unused

 private:
  void validate_shape() const;
  std::size_t dim_ = 0, count_ = 0;
  std::vector<double> coords_;
};

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

/// Ordered working set: indices into a PointSet.
struct SupportSet {
  std::vector<std::size_t> indices;
  std::size_t size() const { return indices.size(); }
};

/// Coefficients of an affine combination with a prescribed coefficient sum.
struct AffineCoeffs {
  std::vector<double> coeffs;
  double target_sum = 1.0;
};

/// A ray origin + direction; directions are normalized by the solver so that
/// (entering point - anchor)^T direction = 1.
struct Ray {
  std::vector<double> origin;
  std::vector<double> direction;
};

/// Solves lifted * coeffs = (y; target_sum), where `lifted` factors the
/// (n+1) x s matrix of working-set points stacked over a row of ones. Requires
/// y in the affine hull of those points for the system to be consistent.
/// Throws DegenerateSupportError when the triangular solve hits a singular
/// pivot.
AffineCoeffs affine_coeffs(const QrFactor& lifted, std::span<const double> y,
                           double target_sum, double rank_tol = qr_tol::rank);

struct IndependenceResult {
  bool independent = false;
  /// Factor extended by the lifted column (p; 1), for reuse. Absent when the
  /// working set already has n + 1 points and the verdict is automatic.
  std::optional<QrFactor> extended;
};

/// Tests whether appending p keeps the working set affinely independent, by
/// inserting the lifted column and inspecting the new diagonal entry of R.
IndependenceResult is_affinely_independent_with(const QrFactor& lifted,
                                                std::span<const double> p,
                                                double rank_tol = qr_tol::rank);

/// Norm of the component of (p; 1) orthogonal to the range of the lifted
/// factor; equals |R(s, s)| after a column insert, without forming it.
double affine_extension_margin(const QrFactor& lifted, std::span<const double> p);

/// anchor + V V^T (y - anchor) for an orthonormal basis V of the hull's
/// direction subspace.
std::vector<double> project_to_affine_hull(const Matrix& v,
                                           std::span<const double> anchor,
                                           std::span<const double> y);

/// Same projection reading the basis directly out of a factor's leading Q
/// columns (avoids materializing V).
std::vector<double> project_to_affine_hull_q(const QrFactor& f,
                                             std::size_t basis_cols,
                                             std::span<const double> anchor,
                                             std::span<const double> y);

/// Smallest ball through two distinct points: center at the midpoint.
Ball two_point_ball(std::span<const double> a, std::span<const double> b);

}  // namespace mcball
