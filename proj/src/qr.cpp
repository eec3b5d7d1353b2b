#include "mcball/qr.hpp"

#include <algorithm>
#include <cmath>

#include "mcball/errors.hpp"

namespace mcball {

namespace qr_stats {
namespace {
thread_local std::uint64_t g_factor_count = 0;
thread_local std::uint64_t g_update_count = 0;
}  // namespace

std::uint64_t factor_count() noexcept { return g_factor_count; }
std::uint64_t update_count() noexcept { return g_update_count; }
void note_update() noexcept { ++g_update_count; }
}  // namespace qr_stats

PlaneRotation make_rotation(std::size_t i, std::size_t j, double a, double b) {
  if (b == 0.0) return {i, j, 1.0, 0.0};
  if (a == 0.0) return {i, j, 0.0, b > 0.0 ? 1.0 : -1.0};
  const double h = std::hypot(a, b);
  return {i, j, a / h, b / h};
}

namespace {

// Applies g to rows g.i and g.j of m over the column range [col_begin, col_end).
void rotate_rows(Matrix& m, const PlaneRotation& g, std::size_t col_begin,
                 std::size_t col_end) {
  double* ri = m.row(g.i).data();
  double* rj = m.row(g.j).data();
  for (std::size_t c = col_begin; c < col_end; ++c) {
    const double a = ri[c], b = rj[c];
    ri[c] = g.c * a + g.s * b;
    rj[c] = -g.s * a + g.c * b;
  }
}

}  // namespace

void Matrix::erase_column(std::size_t c) {
  Matrix out(rows_, cols_ - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* src = row(i).data();
    double* dst = out.row(i).data();
    std::copy(src, src + c, dst);
    std::copy(src + c + 1, src + cols_, dst + c);
  }
  *this = std::move(out);
}

void Matrix::insert_column_at(std::size_t c, std::span<const double> v) {
  Matrix out(rows_, cols_ + 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* src = row(i).data();
    double* dst = out.row(i).data();
    std::copy(src, src + c, dst);
    dst[c] = v[i];
    std::copy(src + c, src + cols_, dst + c + 1);
  }
  *this = std::move(out);
}

void QrFactor::rotate_qt_rows(const PlaneRotation& g) {
  rotate_rows(qt_, g, 0, n_);
}

void QrFactor::rotate_r_rows(const PlaneRotation& g, std::size_t col_begin) {
  rotate_rows(r_, g, col_begin, k_);
}

QrFactor QrFactor::factor(const Matrix& a) {
  const std::size_t n = a.rows(), k = a.cols();
  if (n == 0) throw InputError("factor: matrix must have at least one row");
  if (k > n) throw InputError("factor: more columns than rows");
  if (!a.all_finite()) throw InputError("factor: non-finite entries");

  QrFactor f;
  f.n_ = n;
  f.k_ = k;
  f.qt_ = Matrix::identity(n);
  f.r_ = a;

  std::vector<double> v(n), w(std::max(n, k));
  for (std::size_t j = 0; j < k; ++j) {
    double sigma2 = 0.0;
    for (std::size_t i = j + 1; i < n; ++i) sigma2 += f.r_(i, j) * f.r_(i, j);
    const double ajj = f.r_(j, j);
    if (sigma2 == 0.0 && ajj >= 0.0) continue;  // column already reduced

    const double alpha = (ajj >= 0.0 ? -1.0 : 1.0) * std::sqrt(ajj * ajj + sigma2);
    const std::size_t len = n - j;
    v[0] = ajj - alpha;
    for (std::size_t i = 1; i < len; ++i) v[i] = f.r_(j + i, j);
    const double vtv = dot({v.data(), len}, {v.data(), len});
    if (vtv == 0.0) continue;
    const double tau = 2.0 / vtv;

    // Reflect the trailing block of R.
    std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k - j), 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double* row = f.r_.row(j + i).data();
      for (std::size_t c = j; c < k; ++c) w[c - j] += v[i] * row[c];
    }
    for (std::size_t i = 0; i < len; ++i) {
      double* row = f.r_.row(j + i).data();
      const double tvi = tau * v[i];
      for (std::size_t c = j; c < k; ++c) row[c] -= tvi * w[c - j];
    }
    f.r_(j, j) = alpha;
    for (std::size_t i = j + 1; i < n; ++i) f.r_(i, j) = 0.0;

    // Accumulate the reflection into Q^T.
    std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const double* row = f.qt_.row(j + i).data();
      for (std::size_t c = 0; c < n; ++c) w[c] += v[i] * row[c];
    }
    for (std::size_t i = 0; i < len; ++i) {
      double* row = f.qt_.row(j + i).data();
      const double tvi = tau * v[i];
      for (std::size_t c = 0; c < n; ++c) row[c] -= tvi * w[c];
    }
  }

  ++qr_stats::g_factor_count;
  return f;
}

Matrix QrFactor::q() const {
  Matrix q(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t c = 0; c < n_; ++c) q(i, c) = qt_(c, i);
  return q;
}

void QrFactor::apply_qt(std::span<const double> v, std::span<double> out,
                        std::size_t lead) const {
  for (std::size_t i = 0; i < lead; ++i) out[i] = dot(qt_.row(i), v);
}

void QrFactor::apply_q_band(std::span<const double> z, std::size_t offset,
                            std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] != 0.0) axpy(z[i], qt_.row(offset + i), out);
}

Matrix QrFactor::reconstruct() const {
  Matrix a(n_, k_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t c = 0; c < k_; ++c) {
      double s = 0.0;
      for (std::size_t l = 0; l <= std::min(c, n_ - 1); ++l)
        s += qt_(l, i) * r_(l, c);
      a(i, c) = s;
    }
  return a;
}

double QrFactor::orthogonality_error() const {
  double err = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) {
      const double g = dot(qt_.row(i), qt_.row(j)) - (i == j ? 1.0 : 0.0);
      err = std::max(err, std::abs(g));
    }
  return err;
}

bool QrFactor::full_column_rank(double rank_tol) const {
  const double thresh = rank_tol * (1.0 + r_.max_abs());
  for (std::size_t j = 0; j < k_; ++j)
    if (std::abs(r_(j, j)) <= thresh) return false;
  return true;
}

void QrFactor::insert_column(std::span<const double> col, std::size_t pos) {
  if (col.size() != n_) throw InputError("insert_column: dimension mismatch");
  if (k_ + 1 > n_) throw InputError("insert_column: factor already square");
  if (pos > k_) throw InputError("insert_column: position out of range");

  std::vector<double> w(n_);
  apply_qt(col, w, n_);
  r_.insert_column_at(pos, w);
  ++k_;

  // Chase the spike in column pos up to the diagonal, bottom first.
  for (std::size_t j = n_ - 1; j > pos; --j) {
    if (r_(j, pos) == 0.0) continue;
    const PlaneRotation g = make_rotation(j - 1, j, r_(j - 1, pos), r_(j, pos));
    rotate_r_rows(g, pos);
    rotate_qt_rows(g);
    r_(j, pos) = 0.0;
  }
  qr_stats::g_update_count++;
}

void QrFactor::delete_column(std::size_t pos) {
  if (pos >= k_) throw InputError("delete_column: position out of range");
  r_.erase_column(pos);
  --k_;
  // Re-triangularize: each shifted column carries one subdiagonal entry.
  for (std::size_t c = pos; c < k_; ++c) {
    if (r_(c + 1, c) == 0.0) continue;
    const PlaneRotation g = make_rotation(c, c + 1, r_(c, c), r_(c + 1, c));
    rotate_r_rows(g, c);
    rotate_qt_rows(g);
    r_(c + 1, c) = 0.0;
  }
  qr_stats::g_update_count++;
}

void QrFactor::insert_row(std::span<const double> row, std::size_t pos) {
  if (row.size() != k_) throw InputError("insert_row: dimension mismatch");
  if (pos > n_) throw InputError("insert_row: position out of range");

  const std::size_t n2 = n_ + 1;
  Matrix r2(n2, k_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto src = r_.row(i);
    std::copy(src.begin(), src.end(), r2.row(i).begin());
  }
  std::copy(row.begin(), row.end(), r2.row(n_).begin());

  Matrix qt2(n2, n2);
  for (std::size_t i = 0; i < n_; ++i) {
    auto src = qt_.row(i);
    std::copy(src.begin(), src.end(), qt2.row(i).begin());
  }
  qt2(n_, n_) = 1.0;

  n_ = n2;
  qt_ = std::move(qt2);
  r_ = std::move(r2);

  // Eliminate the appended row against the diagonal.
  for (std::size_t c = 0; c < k_; ++c) {
    if (r_(n_ - 1, c) == 0.0) continue;
    const PlaneRotation g = make_rotation(c, n_ - 1, r_(c, c), r_(n_ - 1, c));
    rotate_r_rows(g, c);
    rotate_qt_rows(g);
    r_(n_ - 1, c) = 0.0;
  }

  // The new row currently sits last; a row permutation of the represented
  // matrix permutes the columns of Q^T only.
  if (pos != n_ - 1) {
    for (std::size_t i = 0; i < n_; ++i) {
      auto row_i = qt_.row(i);
      std::rotate(row_i.begin() + static_cast<std::ptrdiff_t>(pos),
                  row_i.begin() + static_cast<std::ptrdiff_t>(n_ - 1),
                  row_i.end());
    }
  }
  qr_stats::g_update_count++;
}

void QrFactor::rank_one_update(std::span<const double> u,
                               std::span<const double> v) {
  if (u.size() != n_) throw InputError("rank_one_update: u dimension mismatch");
  if (v.size() != k_) throw InputError("rank_one_update: v dimension mismatch");

  std::vector<double> w(n_);
  apply_qt(u, w, n_);

  // Reduce w to ||w|| e_0; R picks up one subdiagonal per rotation.
  for (std::size_t j = n_ - 1; j > 0; --j) {
    if (w[j] == 0.0) continue;
    const PlaneRotation g = make_rotation(j - 1, j, w[j - 1], w[j]);
    w[j - 1] = g.c * w[j - 1] + g.s * w[j];
    w[j] = 0.0;
    rotate_r_rows(g, j >= 1 ? j - 1 : 0);
    rotate_qt_rows(g);
  }

  if (w[0] != 0.0) {
    double* r0 = r_.row(0).data();
    for (std::size_t c = 0; c < k_; ++c) r0[c] += w[0] * v[c];
  }

  // Restore the triangle from the Hessenberg form.
  const std::size_t last = std::min(k_, n_ - 1);
  for (std::size_t j = 0; j < last; ++j) {
    if (r_(j + 1, j) == 0.0) continue;
    const PlaneRotation g = make_rotation(j, j + 1, r_(j, j), r_(j + 1, j));
    rotate_r_rows(g, j);
    rotate_qt_rows(g);
    r_(j + 1, j) = 0.0;
  }
  qr_stats::g_update_count++;
}

std::vector<double> solve_upper(const Matrix& r, std::span<const double> b,
                                double rank_tol) {
  const std::size_t k = r.cols();
  if (b.size() < k) throw InputError("solve_upper: rhs too short");
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) scale = std::max(scale, std::abs(r(i, j)));
  const double thresh = rank_tol * (1.0 + scale);

  std::vector<double> y(k);
  for (std::size_t ii = k; ii-- > 0;) {
    const double piv = r(ii, ii);
    if (std::abs(piv) <= thresh)
      throw SingularSystemError("solve_upper: pivot below rank tolerance", ii);
    double s = b[ii];
    const double* row = r.row(ii).data();
    for (std::size_t c = ii + 1; c < k; ++c) s -= row[c] * y[c];
    y[ii] = s / piv;
  }
  return y;
}

std::vector<double> solve_lower_transposed(const Matrix& r,
                                           std::span<const double> b,
                                           double rank_tol) {
  const std::size_t k = r.cols();
  if (b.size() < k) throw InputError("solve_lower_transposed: rhs too short");
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) scale = std::max(scale, std::abs(r(i, j)));
  const double thresh = rank_tol * (1.0 + scale);

  std::vector<double> y(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double piv = r(i, i);
    if (std::abs(piv) <= thresh)
      throw SingularSystemError("solve_lower_transposed: pivot below rank tolerance",
                                i);
    double s = b[i];
    for (std::size_t c = 0; c < i; ++c) s -= r(c, i) * y[c];
    y[i] = s / piv;
  }
  return y;
}

Matrix null_basis(const QrFactor& f, double rank_tol) {
  if (!f.full_column_rank(rank_tol))
    throw DegenerateSupportError("null_basis: factor is rank deficient");
  const std::size_t n = f.rows(), k = f.cols();
  Matrix w(n, n - k);
  for (std::size_t c = 0; c < n - k; ++c) {
    auto col = f.q_column(k + c);
    for (std::size_t i = 0; i < n; ++i) w(i, c) = col[i];
  }
  return w;
}

Matrix range_basis(const QrFactor& f, double rank_tol) {
  if (!f.full_column_rank(rank_tol))
    throw DegenerateSupportError("range_basis: factor is rank deficient");
  const std::size_t n = f.rows(), k = f.cols();
  Matrix v(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    auto col = f.q_column(c);
    for (std::size_t i = 0; i < n; ++i) v(i, c) = col[i];
  }
  return v;
}

}  // namespace mcball
