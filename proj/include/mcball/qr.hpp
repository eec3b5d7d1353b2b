#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcball/matrix.hpp"

namespace mcball {

namespace qr_tol {
/// Orthogonality drift allowance for an n x n orthogonal factor.
inline double orth(std::size_t n) { return 1e-12 * static_cast<double>(n); }
/// Reconstruction allowance, relative to 1 + max-abs of the represented matrix.
inline constexpr double reconstruct = 1e-11;
/// Base rank tolerance, scaled by 1 + max-abs at the point of use.
inline constexpr double rank = 1e-10;
}  // namespace qr_tol

namespace qr_stats {
/// Number of from-scratch factorizations on this thread.
std::uint64_t factor_count() noexcept;
/// Number of factor update operations on this thread (column/row edits,
/// rank-one modifications, and lazily evaluated variants thereof).
std::uint64_t update_count() noexcept;
void note_update() noexcept;  // instrumentation hook for lazy update paths
}  // namespace qr_stats

/// One plane rotation acting on coordinate pair (i, j):
///   x_i' =  c x_i + s x_j
///   x_j' = -s x_i + c x_j
struct PlaneRotation {
  std::size_t i, j;
  double c, s;
};

/// Rotation zeroing b against a: returns (c, s) with c*a + s*b = hypot(a, b).
PlaneRotation make_rotation(std::size_t i, std::size_t j, double a, double b);

/// QR factorization A = Q R of an n x k matrix (k <= n) with Q stored
/// explicitly and R kept upper trapezoidal (entries below the diagonal are
/// exact zeros). The factor is maintained under structural edits by Givens
/// rotations; a from-scratch factorization happens only in factor().
///
/// Internally Q is held transposed and row-major, so a rotation applied to a
/// column pair of Q touches two contiguous rows, and columns of Q read out as
/// contiguous spans.
class QrFactor {
 public:
  QrFactor() = default;

  /// From-scratch Householder factorization. Requires rows >= cols and finite
  /// entries. The only operation that counts against the from-scratch budget.
  static QrFactor factor(const Matrix& a);

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return k_; }

  const Matrix& r() const { return r_; }
  /// Materializes the orthogonal factor (n x n). Intended for tests and
  /// diagnostics; hot paths use q_column/apply_q/apply_qt instead.
  Matrix q() const;

  /// Column i of Q as a contiguous span.
  std::span<const double> q_column(std::size_t i) const { return qt_.row(i); }

  /// out = Q^T v, first `lead` entries only (lead = n for the full product).
  void apply_qt(std::span<const double> v, std::span<double> out,
                std::size_t lead) const;
  /// out = sum_i z[i] * Q(:, offset + i); i.e. Q restricted to a column band.
  void apply_q_band(std::span<const double> z, std::size_t offset,
                    std::span<double> out) const;

  /// Represented matrix Q * R (n x k), for tests and validation.
  Matrix reconstruct() const;

  /// max-abs(Q^T Q - I); O(n^3), validation only.
  double orthogonality_error() const;

  /// True when every leading diagonal entry of R clears tol * (1 + max-abs R).
  bool full_column_rank(double rank_tol = qr_tol::rank) const;

  // -- Structural updates (in place, Givens-based) --------------------------

  /// Insert `col` before column `pos` (0 <= pos <= k). Requires k + 1 <= n.
  void insert_column(std::span<const double> col, std::size_t pos);
  /// Delete column `pos`.
  void delete_column(std::size_t pos);
  /// Insert `row` before row `pos` (0 <= pos <= n). Requires k <= n (the
  /// result has n + 1 rows).
  void insert_row(std::span<const double> row, std::size_t pos);
  /// Apply A <- A + u v^T.
  void rank_one_update(std::span<const double> u, std::span<const double> v);

 private:
  std::size_t n_ = 0, k_ = 0;
  Matrix qt_;  // n x n, row i = column i of Q
  Matrix r_;   // n x k, upper trapezoidal

  void rotate_qt_rows(const PlaneRotation& g);
  void rotate_r_rows(const PlaneRotation& g, std::size_t col_begin);
};

// -- Triangular solves -------------------------------------------------------

/// Solves the leading k x k block of upper-triangular r against the first k
/// entries of b by back substitution (k = r.cols()). Throws
/// SingularSystemError with the pivot index when |r(i,i)| falls below
/// rank_tol * (1 + max-abs of the block).
std::vector<double> solve_upper(const Matrix& r, std::span<const double> b,
                                double rank_tol = qr_tol::rank);

/// Solves r^T y = b (leading block) by forward substitution.
std::vector<double> solve_lower_transposed(const Matrix& r,
                                           std::span<const double> b,
                                           double rank_tol = qr_tol::rank);

// -- Orthonormal bases -------------------------------------------------------

/// Last n - k columns of Q: an orthonormal basis of the orthogonal complement
/// of the represented matrix's range. Requires full column rank.
Matrix null_basis(const QrFactor& f, double rank_tol = qr_tol::rank);

/// First k columns of Q: an orthonormal basis of the range. Requires full
/// column rank.
Matrix range_basis(const QrFactor& f, double rank_tol = qr_tol::rank);

}  // namespace mcball
