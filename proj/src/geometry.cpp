#include "mcball/geometry.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "mcball/errors.hpp"

namespace mcball {

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), count_(dim == 0 ? 0 : coords.size() / dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() != dim_ * count_)
    throw InputError("PointSet: coordinate buffer does not match dimensions");
  validate_shape();
  check_finite();
}

void PointSet::validate_shape() const {
  if (dim_ < 1) throw InputError("PointSet: dimension must be at least 1");
  if (count_ < 1) throw InputError("PointSet: need at least one point");
}

double PointSet::max_abs() const {
  double m = 0.0;
  for (double v : coords_) m = std::max(m, std::abs(v));
  return m;
}

void PointSet::check_finite() const {
  for (double v : coords_)
    if (!std::isfinite(v)) throw InputError("PointSet: non-finite coordinate");
}

namespace {

struct SpanHash {
  std::size_t operator()(const std::vector<double>& v) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (double d : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof(bits));
      h ^= bits;
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

}  // namespace

PointSet PointSet::deduplicated(std::size_t* removed) const {
  std::unordered_set<std::vector<double>, SpanHash> seen;
  std::vector<double> kept;
  std::vector<std::string> kept_labels;
  kept.reserve(coords_.size());
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < count_; ++i) {
    auto p = point(i);
    std::vector<double> key(p.begin(), p.end());
    for (double& v : key)
      if (v == 0.0) v = 0.0;  // collapse -0.0 onto +0.0 for hashing
    if (seen.insert(std::move(key)).second) {
      kept.insert(kept.end(), p.begin(), p.end());
      if (!labels.empty()) kept_labels.push_back(labels[i]);
    } else {
      ++dropped;
    }
  }
  if (removed) *removed = dropped;
  PointSet out(dim_, std::move(kept));
  out.labels = std::move(kept_labels);
  return out;
}

Matrix PointSet::gather_columns(std::span<const std::size_t> subset) const {
  Matrix m(dim_, subset.size());
  for (std::size_t c = 0; c < subset.size(); ++c) {
    auto p = point(subset[c]);
    for (std::size_t i = 0; i < dim_; ++i) m(i, c) = p[i];
  }
  return m;
}

AffineCoeffs affine_coeffs(const QrFactor& lifted, std::span<const double> y,
                           double target_sum, double rank_tol) {
  const std::size_t rows = lifted.rows(), s = lifted.cols();
  if (y.size() + 1 != rows) throw InputError("affine_coeffs: dimension mismatch");
  std::vector<double> rhs(rows);
  std::copy(y.begin(), y.end(), rhs.begin());
  rhs[rows - 1] = target_sum;

  std::vector<double> w(s);
  lifted.apply_qt(rhs, w, s);
  try {
    return {solve_upper(lifted.r(), w, rank_tol), target_sum};
  } catch (const SingularSystemError& e) {
    throw DegenerateSupportError(
        std::string("affine_coeffs: working set degenerate (") + e.what() + ")");
  }
}

IndependenceResult is_affinely_independent_with(const QrFactor& lifted,
                                                std::span<const double> p,
                                                double rank_tol) {
  const std::size_t rows = lifted.rows(), s = lifted.cols();
  if (p.size() + 1 != rows)
    throw InputError("is_affinely_independent_with: dimension mismatch");
  if (s == rows) return {false, std::nullopt};  // already n + 1 points

  std::vector<double> col(rows);
  std::copy(p.begin(), p.end(), col.begin());
  col[rows - 1] = 1.0;

  QrFactor extended = lifted;
  extended.insert_column(col, s);
  const double pivot = std::abs(extended.r()(s, s));
  const bool independent = pivot > rank_tol * (1.0 + extended.r().max_abs());
  return {independent, std::move(extended)};
}

double affine_extension_margin(const QrFactor& lifted, std::span<const double> p) {
  const std::size_t rows = lifted.rows(), s = lifted.cols();
  if (p.size() + 1 != rows)
    throw InputError("affine_extension_margin: dimension mismatch");
  std::vector<double> col(rows), w(rows);
  std::copy(p.begin(), p.end(), col.begin());
  col[rows - 1] = 1.0;
  lifted.apply_qt(col, w, rows);
  return norm2({w.data() + s, rows - s});
}

std::vector<double> project_to_affine_hull(const Matrix& v,
                                           std::span<const double> anchor,
                                           std::span<const double> y) {
  const std::size_t n = v.rows();
  std::vector<double> z = sub(y, anchor);
  std::vector<double> out(anchor.begin(), anchor.end());
  for (std::size_t c = 0; c < v.cols(); ++c) {
    double coef = 0.0;
    for (std::size_t i = 0; i < n; ++i) coef += v(i, c) * z[i];
    for (std::size_t i = 0; i < n; ++i) out[i] += coef * v(i, c);
  }
  return out;
}

std::vector<double> project_to_affine_hull_q(const QrFactor& f,
                                             std::size_t basis_cols,
                                             std::span<const double> anchor,
                                             std::span<const double> y) {
  std::vector<double> z = sub(y, anchor);
  std::vector<double> out(anchor.begin(), anchor.end());
  for (std::size_t c = 0; c < basis_cols; ++c) {
    auto col = f.q_column(c);
    axpy(dot(col, z), col, out);
  }
  return out;
}

Ball two_point_ball(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("two_point_ball: dimension mismatch");
  Ball ball;
  ball.center.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) ball.center[i] = 0.5 * (a[i] + b[i]);
  ball.radius = dist(a, ball.center);
  return ball;
}

}  // namespace mcball
