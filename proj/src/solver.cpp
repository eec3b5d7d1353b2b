#include "mcball/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mcball {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Back substitution against the leading k x k block of an upper-trapezoidal
// matrix, mirroring solve_upper's pivot guard.
std::vector<double> back_substitute_leading(const Matrix& r,
                                            std::span<const double> b,
                                            std::size_t k, double rank_tol) {
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) scale = std::max(scale, std::abs(r(i, j)));
  const double thresh = rank_tol * (1.0 + scale);
  std::vector<double> y(k);
  for (std::size_t ii = k; ii-- > 0;) {
    const double piv = r(ii, ii);
    if (std::abs(piv) <= thresh)
      throw DegenerateSupportError(
          "working_set_coeffs: difference matrix lost rank");
    double s = b[ii];
    const double* row = r.row(ii).data();
    for (std::size_t c = ii + 1; c < k; ++c) s -= row[c] * y[c];
    y[ii] = s / piv;
  }
  return y;
}

// Shared drop rule: argmin pi_j / (-omega_j) over omega_j < 0, smallest slot
// on ties.
std::size_t ratio_test_pick(std::span<const double> pi,
                            std::span<const double> om) {
  const double guard = 1e-12 * (1.0 + max_abs_of(om));
  std::optional<std::size_t> k;
  double best = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    if (om[j] >= -guard) continue;
    const double ratio = pi[j] / (-om[j]);
    if (!k || ratio < best) {
      k = j;
      best = ratio;
    }
  }
  if (!k)
    throw InvariantViolationError(
        "update_support: entering point is affinely dependent but no "
        "coefficient allows a drop");
  return *k;
}

// Scratch workspace for one facet downdate of the C factor. The downdate's
// Givens chain is applied to copies of the affected R block and Q columns;
// everything the rotations do not touch is shared with the source factor,
// in particular the trailing null columns of Q. The factor's single new null
// direction comes out as the last rotated Q column.
struct FacetScratch {
  Matrix r_block;   // rotated rows x shifted columns of R
  Matrix q_rows;    // rotated rows of Q^T (= columns of Q)
  std::vector<double> w;  // leading coefficients of Q^T u (anchor route)

  void rotate(const PlaneRotation& g, std::size_t r_col_begin,
              std::size_t r_cols, std::size_t q_cols) {
    double* ri = r_block.row(g.i).data();
    double* rj = r_block.row(g.j).data();
    for (std::size_t c = r_col_begin; c < r_cols; ++c) {
      const double a = ri[c], b = rj[c];
      ri[c] = g.c * a + g.s * b;
      rj[c] = -g.s * a + g.c * b;
    }
    double* qi = q_rows.row(g.i).data();
    double* qj = q_rows.row(g.j).data();
    for (std::size_t c = 0; c < q_cols; ++c) {
      const double a = qi[c], b = qj[c];
      qi[c] = g.c * a + g.s * b;
      qj[c] = -g.s * a + g.c * b;
    }
  }
};

// Downdate for the facet opposed to a non-anchor working point: delete the
// matching difference column and re-triangularize rows c_col..t-1.
std::vector<double> facet_null_delete(const QrFactor& f, std::size_t c_col,
                                      FacetScratch& ws) {
  const std::size_t t = f.cols(), n = f.rows();
  const Matrix& r = f.r();
  const std::size_t mr = t - c_col;      // affected rows c_col .. t-1
  const std::size_t mc = t - 1 - c_col;  // columns shifted into them

  ws.r_block = Matrix(mr, std::max<std::size_t>(mc, 1));
  for (std::size_t i = 0; i < mr; ++i)
    for (std::size_t j = 0; j < mc; ++j) ws.r_block(i, j) = r(c_col + i, c_col + 1 + j);
  ws.q_rows = Matrix(mr, n);
  for (std::size_t i = 0; i < mr; ++i) {
    const auto src = f.q_column(c_col + i);
    std::copy(src.begin(), src.end(), ws.q_rows.row(i).begin());
  }

  for (std::size_t l = 0; l < mc; ++l) {
    const double a = ws.r_block(l, l), b = ws.r_block(l + 1, l);
    if (b == 0.0) continue;
    const PlaneRotation g = make_rotation(l, l + 1, a, b);
    ws.rotate(g, l, mc, n);
    ws.r_block(l + 1, l) = 0.0;
  }
  qr_stats::note_update();
  return {ws.q_rows.row(mr - 1).begin(), ws.q_rows.row(mr - 1).end()};
}

// Downdate for the facet opposed to the difference anchor: drop the entering
// point's column and shift every difference onto the entering point, i.e. a
// rank-one change by u 1^T with u = anchor - p. u lies in span(C), so the
// rotation chain stays within the leading t coordinates.
std::vector<double> facet_null_anchor(const QrFactor& f,
                                      std::span<const double> u,
                                      FacetScratch& ws) {
  const std::size_t t = f.cols(), n = f.rows();
  const Matrix& r = f.r();
  const std::size_t mc = t - 1;

  ws.w.resize(t);
  f.apply_qt(u, ws.w, t);
  ws.r_block = Matrix(t, std::max<std::size_t>(mc, 1));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i; j < mc; ++j) ws.r_block(i, j) = r(i, j);
  ws.q_rows = Matrix(t, n);
  for (std::size_t i = 0; i < t; ++i) {
    const auto src = f.q_column(i);
    std::copy(src.begin(), src.end(), ws.q_rows.row(i).begin());
  }

  for (std::size_t j = t - 1; j > 0; --j) {
    if (ws.w[j] == 0.0) continue;
    const PlaneRotation g = make_rotation(j - 1, j, ws.w[j - 1], ws.w[j]);
    ws.w[j - 1] = g.c * ws.w[j - 1] + g.s * ws.w[j];
    ws.w[j] = 0.0;
    ws.rotate(g, j > 1 ? j - 1 : 0, mc, n);
  }
  if (ws.w[0] != 0.0) {
    double* r0 = ws.r_block.row(0).data();
    for (std::size_t c = 0; c < mc; ++c) r0[c] += ws.w[0];
  }
  for (std::size_t j = 0; j < mc; ++j) {
    if (ws.r_block(j + 1, j) == 0.0) continue;
    const PlaneRotation g =
        make_rotation(j, j + 1, ws.r_block(j, j), ws.r_block(j + 1, j));
    ws.rotate(g, j, mc, n);
    ws.r_block(j + 1, j) = 0.0;
  }
  qr_stats::note_update();
  return {ws.q_rows.row(t - 1).begin(), ws.q_rows.row(t - 1).end()};
}

std::vector<double> facet_null_direction(const QrFactor& c_factor,
                                         std::span<const double> p,
                                         std::span<const double> anchor,
                                         std::size_t slot,
                                         std::size_t anchor_pos,
                                         FacetScratch& ws) {
  if (slot == anchor_pos) return facet_null_anchor(c_factor, sub(anchor, p), ws);
  return facet_null_delete(c_factor, slot < anchor_pos ? slot : slot - 1, ws);
}

struct AlphaEval {
  double alpha = 0.0;
  bool defined = false;
};

// Intersection parameter of the ray with one facet, evaluated over the
// facet's full null basis: the freshly exposed direction from the downdate
// plus the columns inherited from C's own null space. Among those,
// alpha = (p - x)^T w_i / d^T w_i for the i maximizing |d^T w_i|. The
// inherited directions are orthogonal to d up to roundoff, so on well-posed
// states the choice lands on the fresh column; a vanishing maximum means the
// ray is parallel to the facet.
AlphaEval eval_alpha(const QrFactor& c_factor, std::span<const double> pmx,
                     std::span<const double> d, std::span<const double> w_new,
                     double d_norm) {
  const std::size_t n = c_factor.rows(), t = c_factor.cols();
  double best_abs = std::abs(dot(d, w_new));
  std::size_t best_col = n;  // sentinel: the fresh direction
  for (std::size_t i = t; i < n; ++i) {
    const double den_i = dot(d, c_factor.q_column(i));
    if (std::abs(den_i) > best_abs) {
      best_abs = std::abs(den_i);
      best_col = i;
    }
  }
  if (best_abs <= 1e-12 * d_norm) return {0.0, false};
  const std::span<const double> w =
      best_col == n ? w_new : c_factor.q_column(best_col);
  return {dot(pmx, w) / dot(d, w), true};
}

constexpr double kNegativeAlphaSlack = 1e-12;

}  // namespace

std::optional<std::size_t> select_violator(const PointSet& pts, const Ball& ball,
                                           ViolatorRule rule, double coverage_tol,
                                           const AffineHullView* hull,
                                           double min_hull_distance) {
  const double limit = ball.radius * (1.0 + coverage_tol) + coverage_tol;
  const double limit2 = limit * limit;
  const std::size_t m = pts.count();

  if (rule == ViolatorRule::first) {
    for (std::size_t i = 0; i < m; ++i)
      if (dist2(pts.point(i), ball.center) > limit2) return i;
    return std::nullopt;
  }

  std::vector<std::pair<double, std::size_t>> uncovered;
  for (std::size_t i = 0; i < m; ++i) {
    const double di = dist2(pts.point(i), ball.center);
    if (di > limit2) uncovered.emplace_back(di, i);
  }
  if (uncovered.empty()) return std::nullopt;

  const auto farther = [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  if (rule == ViolatorRule::farthest || hull == nullptr)
    return std::min_element(uncovered.begin(), uncovered.end(),
                            [&](const auto& a, const auto& b) { return farther(a, b); })
        ->second;

  // farthest_filtered: walk candidates far-to-near, skipping points too close
  // to the working set's affine hull; fall back to plain farthest.
  std::sort(uncovered.begin(), uncovered.end(), farther);
  for (const auto& [di, idx] : uncovered) {
    std::vector<double> res = sub(pts.point(idx), hull->anchor);
    for (std::size_t c = 0; c < hull->sub_dim; ++c) {
      auto col = hull->basis_factor.q_column(c);
      axpy(-dot(col, res), col, res);
    }
    if (norm2(res) >= min_hull_distance) return idx;
  }
  return uncovered.front().second;
}

std::size_t ratio_test_drop(const QrFactor& b_factor, std::span<const double> x,
                            std::span<const double> p, double rank_tol) {
  const std::vector<double> pi = affine_coeffs(b_factor, x, 1.0, rank_tol).coeffs;
  std::vector<double> neg_p(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) neg_p[i] = -p[i];
  const std::vector<double> om =
      affine_coeffs(b_factor, neg_p, -1.0, rank_tol).coeffs;
  return ratio_test_pick(pi, om);
}

std::vector<double> working_set_coeffs(const QrFactor& c_factor,
                                       std::size_t diff_cols,
                                       std::size_t anchor_pos,
                                       std::span<const double> anchor,
                                       std::span<const double> y,
                                       double target_sum, double rank_tol) {
  // eliminating the sum constraint into the anchor: with
  // coeff_anchor = target_sum - sum(lambda), the anchored system reads
  // D lambda = y - target_sum * anchor
  std::vector<double> rhs(y.begin(), y.end());
  axpy(-target_sum, anchor, rhs);
  std::vector<double> qt_rhs(diff_cols);
  c_factor.apply_qt(rhs, qt_rhs, diff_cols);
  const std::vector<double> lambda =
      back_substitute_leading(c_factor.r(), qt_rhs, diff_cols, rank_tol);

  std::vector<double> coeffs(diff_cols + 1);
  double lsum = 0.0;
  for (std::size_t c = 0; c < diff_cols; ++c) {
    const std::size_t slot = c < anchor_pos ? c : c + 1;
    coeffs[slot] = lambda[c];
    lsum += lambda[c];
  }
  coeffs[anchor_pos] = target_sum - lsum;
  return coeffs;
}

std::vector<double> compute_direction(const QrFactor& c_factor, double rank_tol) {
  const std::size_t t = c_factor.cols();
  std::vector<double> e(t, 0.0);
  e[t - 1] = 1.0;
  std::vector<double> z;
  try {
    z = solve_lower_transposed(c_factor.r(), e, rank_tol);
  } catch (const SingularSystemError& err) {
    throw DegenerateSupportError(
        std::string("compute_direction: difference matrix lost rank (") +
        err.what() + ")");
  }
  std::vector<double> d(c_factor.rows());
  c_factor.apply_q_band(z, 0, d);
  return d;
}

double alpha_bisector(std::span<const double> x, double r_cur,
                      std::span<const double> p) {
  return 0.5 * (dist2(p, x) - r_cur * r_cur);
}

FacetCandidate facet_search_scan(const QrFactor& c_factor, const Ray& ray,
                                 std::span<const double> p,
                                 std::span<const double> anchor,
                                 std::size_t anchor_pos) {
  const std::size_t t = c_factor.cols();
  const std::span<const double> d = ray.direction;
  const std::vector<double> pmx = sub(p, ray.origin);
  const double d_norm = norm2(d);

  FacetScratch ws;
  bool found = false;
  FacetCandidate best;
  for (std::size_t slot = 0; slot < t; ++slot) {
    const auto w = facet_null_direction(c_factor, p, anchor, slot, anchor_pos, ws);
    const AlphaEval ev = eval_alpha(c_factor, pmx, d, w, d_norm);
    if (!ev.defined || ev.alpha < -kNegativeAlphaSlack) continue;
    const double a = std::max(ev.alpha, 0.0);
    if (!found || a < best.alpha) {
      best = {a, slot, false};
      found = true;
    }
  }
  if (!found)
    throw NumericalDegeneracyError(
        "facet_search_scan: no facet intersection was defined and nonnegative");
  return best;
}

FacetCandidate facet_search_projection(const QrFactor& c_factor, const Ray& ray,
                                       std::span<const double> p,
                                       std::span<const double> first_point,
                                       std::span<const double> anchor,
                                       std::size_t anchor_pos,
                                       double case1_tol, double rank_tol) {
  const std::size_t t = c_factor.cols();
  const std::span<const double> x = ray.origin;
  const std::span<const double> d = ray.direction;

  // Project the center and the entering point onto the working set's hull;
  // the ray projects onto the single point x'.
  const std::size_t sub_dim = t - 1;
  const std::vector<double> xp =
      project_to_affine_hull_q(c_factor, sub_dim, first_point, x);
  const std::vector<double> pp =
      project_to_affine_hull_q(c_factor, sub_dim, first_point, p);

  const std::vector<double> pi = working_set_coeffs(c_factor, sub_dim, anchor_pos,
                                                    anchor, xp, 1.0, rank_tol);
  const std::vector<double> om = working_set_coeffs(c_factor, sub_dim, anchor_pos,
                                                    anchor, pp, 1.0, rank_tol);

  const double coeff_scale = 1.0 + std::max(max_abs_of(pi), max_abs_of(om));
  const double tol1 = case1_tol * coeff_scale;

  // Both coefficients vanishing means the facet opposed to that point is
  // perpendicular to the working-set hull; the ray meets it at the start.
  for (std::size_t k = 0; k < t; ++k)
    if (std::abs(pi[k]) <= tol1 && std::abs(om[k]) <= tol1) return {0.0, k, true};

  const double omega_guard = 1e-13 * (1.0 + max_abs_of(om));
  std::optional<std::size_t> k1, k2;
  double best1 = 0.0, best2 = 0.0;
  for (std::size_t j = 0; j < t; ++j) {
    if (om[j] > omega_guard && pi[j] >= -tol1) {
      const double ratio = pi[j] / om[j];
      if (!k1 || ratio < best1) {
        k1 = j;
        best1 = ratio;
      }
    } else if (om[j] < -omega_guard && pi[j] <= tol1) {
      const double ratio = pi[j] / om[j];
      if (!k2 || ratio > best2) {
        k2 = j;
        best2 = ratio;
      }
    }
  }
  if (!k1 && !k2)
    throw InvariantViolationError(
        "facet_search_projection: both candidate sets empty; projected center "
        "is not a convex combination of the projected working set");

  const std::vector<double> pmx = sub(p, x);
  const double d_norm = norm2(d);

  FacetScratch ws;
  bool found = false;
  FacetCandidate best;
  for (const auto& cand : {k1, k2}) {
    if (!cand) continue;
    const auto w = facet_null_direction(c_factor, p, anchor, *cand, anchor_pos, ws);
    const AlphaEval ev = eval_alpha(c_factor, pmx, d, w, d_norm);
    if (!ev.defined || ev.alpha < -kNegativeAlphaSlack) continue;
    const double a = std::max(ev.alpha, 0.0);
    if (!found || a < best.alpha || (a == best.alpha && *cand < best.leaving_slot)) {
      best = {a, *cand, false};
      found = true;
    }
  }
  if (!found)
    throw NumericalDegeneracyError(
        "facet_search_projection: candidate facet intersections undefined");
  return best;
}

namespace {

// Working-set bookkeeping: the ordered point slots plus the one factor the
// iteration maintains — the anchored difference matrix, with the entering
// point's column in the last position while a directional search is running.
// Every coefficient system the iteration needs reduces to this factor; the
// margin of a prospective entering point is the new diagonal entry its
// column insert produces (the distance from p to the working set's hull).
struct SupportState {
  const PointSet* pts = nullptr;
  std::vector<std::size_t> slots;
  std::size_t anchor_pos = 0;
  QrFactor c;

  std::size_t size() const { return slots.size(); }
  std::span<const double> point_of(std::size_t slot) const {
    return pts->point(slots[slot]);
  }
  std::span<const double> anchor_point() const { return point_of(anchor_pos); }
  std::span<const double> first_point() const { return point_of(0); }

  static SupportState initialize(const PointSet& pts,
                                 std::vector<std::size_t> idx) {
    SupportState st;
    st.pts = &pts;
    st.slots = std::move(idx);
    const std::size_t t = st.slots.size();
    st.anchor_pos = t - 1;

    Matrix diffs(pts.dim(), t - 1);
    const auto a = st.anchor_point();
    for (std::size_t c = 0; c + 1 < t; ++c) {
      const auto q = st.point_of(c);
      for (std::size_t i = 0; i < pts.dim(); ++i) diffs(i, c) = q[i] - a[i];
    }
    st.c = QrFactor::factor(diffs);  // sole from-scratch factorization
    return st;
  }

  std::size_t c_col_of(std::size_t slot) const {
    return slot < anchor_pos ? slot : slot - 1;
  }

  double rank_threshold(double rank_tol) const {
    return rank_tol * (1.0 + c.r().max_abs());
  }

  /// Coefficients of y over the working points with the given target sum.
  /// diff_cols selects how many leading difference columns are in play
  /// (slots.size() - 1; the entering column, when present, is excluded).
  std::vector<double> coeffs_of(std::span<const double> y, double target_sum,
                                double rank_tol) const {
    return working_set_coeffs(c, size() - 1, anchor_pos, anchor_point(), y,
                              target_sum, rank_tol);
  }

  /// Entering step: appends p's difference column and reports whether the
  /// extended working set is affinely independent. When it is not, runs the
  /// ratio test, drops the blocking point, and re-enters p. Returns the
  /// dropped slot, if any.
  std::optional<std::size_t> enter(std::span<const double> p,
                                   std::span<const double> x, double rank_tol) {
    std::optional<std::size_t> dropped;
    bool inserted = false;
    if (size() <= pts->dim()) {
      c.insert_column(sub(p, anchor_point()), c.cols());
      inserted = true;
      if (std::abs(c.r()(c.cols() - 1, c.cols() - 1)) > rank_threshold(rank_tol))
        return dropped;  // independent: ready for the searches
      c.delete_column(c.cols() - 1);  // drop the entering column again
    }

    const std::vector<double> pi = coeffs_of(x, 1.0, rank_tol);
    std::vector<double> neg_p(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) neg_p[i] = -p[i];
    const std::vector<double> om = coeffs_of(neg_p, -1.0, rank_tol);
    dropped = ratio_test_pick(pi, om);
    drop_slot(*dropped);

    c.insert_column(sub(p, anchor_point()), c.cols());
    if (std::abs(c.r()(c.cols() - 1, c.cols() - 1)) <= rank_threshold(rank_tol)) {
      if (inserted)
        throw InvariantViolationError(
            "update_support: drop did not restore affine independence");
      throw InvariantViolationError(
          "update_support: full working set remained dependent after a drop");
    }
    return dropped;
  }

  /// Removes a working point. Dropping the difference anchor re-anchors at
  /// the last remaining slot.
  void drop_slot(std::size_t k) {
    const std::size_t t = size();
    if (k != anchor_pos) {
      c.delete_column(c_col_of(k));
      slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(k));
      if (k < anchor_pos) --anchor_pos;
      return;
    }
    const std::size_t a2 = (k == t - 1) ? t - 2 : t - 1;
    const std::vector<double> shift = sub(point_of(k), point_of(a2));
    c.delete_column(c_col_of(a2));
    c.rank_one_update(shift, std::vector<double>(c.cols(), 1.0));
    slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(k));
    anchor_pos = a2 > k ? a2 - 1 : a2;
  }

  /// Iteration end: the entering point joins the working set. Its difference
  /// column is already the last column of c.
  void append(std::size_t point_id) { slots.push_back(point_id); }

  /// Validate-mode recovery from orthogonality drift.
  void rebuild() {
    SupportState fresh = initialize(*pts, slots);
    *this = std::move(fresh);
  }
};

struct EngineTimer {
  Clock::time_point mark = Clock::now();
  double lap() {
    const auto now = Clock::now();
    const double s = std::chrono::duration<double>(now - mark).count();
    mark = now;
    return s;
  }
};

double orthogonality_probe(const QrFactor& f) {
  const std::size_t n = f.rows();
  std::vector<double> v(n), w(n), u(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
  f.apply_qt(v, w, n);
  f.apply_q_band(w, 0, u);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(u[i] - v[i]));
  return err;
}

void validate_iteration(const SupportState& st, std::span<const double> x,
                        double r, const SolveReport& rep, double rank_tol) {
  for (std::size_t slot = 0; slot < st.size(); ++slot) {
    const double di = dist(x, st.point_of(slot));
    if (std::abs(di - r) > 1e-8 * (1.0 + r))
      throw InvariantViolationError(
          "validate: working point left the ball boundary");
  }
  const std::vector<double> pi = st.coeffs_of(x, 1.0, rank_tol);
  const double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvariantViolationError("validate: affine coefficients lost unit sum");
  for (double v : pi)
    if (v < -1e-9)
      throw InvariantViolationError(
          "validate: center left the working set's convex hull");
  const std::size_t k = rep.radius_trace.size();
  if (k >= 2 && rep.radius_trace[k - 1] <= rep.radius_trace[k - 2] - 1e-12)
    throw InvariantViolationError("validate: radius failed to increase");
}

}  // namespace

SolveResult solve(const PointSet& pts, const SolverConfig& cfg,
                  const std::optional<WarmStart>& warm) {
  const std::size_t n = pts.dim(), m = pts.count();
  const std::size_t max_iter =
      cfg.max_iterations > 0 ? cfg.max_iterations : 10 * (n + 2) * m;
  const double min_hull_dist = 10.0 * cfg.rank_tol * (1.0 + pts.max_abs());

  const auto t_total = Clock::now();
  const std::uint64_t fac0 = qr_stats::factor_count();
  const std::uint64_t upd0 = qr_stats::update_count();

  SolveReport rep;
  auto finish = [&](std::vector<double> x, double r, SupportSet support) {
    rep.support_size_final = support.size();
    rep.qr_factorizations = qr_stats::factor_count() - fac0;
    rep.qr_updates = qr_stats::update_count() - upd0;
    rep.phase_seconds.total = seconds_since(t_total);
    return SolveResult{Ball{std::move(x), r}, std::move(support), rep};
  };

  if (m == 1) {
    rep.radius_trace.push_back(0.0);
    auto p0 = pts.point(0);
    return finish({p0.begin(), p0.end()}, 0.0, SupportSet{{0}});
  }

  SupportState st;
  std::vector<double> x;
  double r = 0.0;

  if (warm) {
    const auto& idx = warm->support.indices;
    if (idx.empty() || idx.size() > n + 1)
      throw InputError("solve: warm start support size out of range");
    for (std::size_t i : idx)
      if (i >= m) throw InputError("solve: warm start index out of range");
    std::vector<std::size_t> sorted(idx.begin(), idx.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InputError("solve: warm start support has duplicate indices");
    if (warm->ball.center.size() != n)
      throw InputError("solve: warm start center dimension mismatch");
    st = SupportState::initialize(pts, idx);
    x = warm->ball.center;
    r = warm->ball.radius;
  } else {
    auto farthest_from = [&](std::span<const double> q) {
      std::size_t best = 0;
      double bd = -1.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double di = dist2(pts.point(i), q);
        if (di > bd) {
          bd = di;
          best = i;
        }
      }
      return best;
    };
    const std::size_t a = farthest_from(pts.point(0));
    if (dist2(pts.point(a), pts.point(0)) == 0.0) {
      // every point coincides with the first one
      rep.radius_trace.push_back(0.0);
      auto p0 = pts.point(0);
      return finish({p0.begin(), p0.end()}, 0.0, SupportSet{{0}});
    }
    const std::size_t bpt = farthest_from(pts.point(a));
    st = SupportState::initialize(pts, {a, bpt});
    const Ball init = two_point_ball(pts.point(a), pts.point(bpt));
    x = init.center;
    r = init.radius;
  }
  rep.radius_trace.push_back(r);
  if (cfg.validate) validate_iteration(st, x, r, rep, cfg.rank_tol);

  EngineTimer timer;
  while (true) {
    if (rep.iterations >= max_iter) {
      rep.support_size_final = st.size();
      rep.qr_factorizations = qr_stats::factor_count() - fac0;
      rep.qr_updates = qr_stats::update_count() - upd0;
      rep.phase_seconds.total = seconds_since(t_total);
      throw IterationLimitError("solve: iteration cap reached before coverage",
                                rep);
    }

    timer.lap();
    const AffineHullView hull{st.c, st.c.cols(), st.anchor_point()};
    const auto violator = select_violator(pts, Ball{x, r}, cfg.violator_rule,
                                          cfg.coverage_tol, &hull, min_hull_dist);
    rep.phase_seconds.violator += timer.lap();
    if (!violator) break;

    const std::size_t p_id = *violator;
    const auto p = pts.point(p_id);

    std::size_t drops = 0;
    if (st.enter(p, x, cfg.rank_tol)) ++drops;
    rep.phase_seconds.support_update += timer.lap();

    while (true) {
      ++rep.directional_searches;
      const std::uint64_t upd_before = qr_stats::update_count();

      const std::vector<double> d = compute_direction(st.c, cfg.rank_tol);
      const double r_run = dist(x, st.anchor_point());
      const double ab = alpha_bisector(x, r_run, p);

      if (cfg.observer) {
        cfg.observer->on_search(DirectionalSearchView{
            st.c, x, p, st.first_point(), st.anchor_point(), d, ab, st.slots,
            st.anchor_pos});
      }

      const Ray ray{x, d};
      const FacetCandidate fc =
          cfg.variant == Variant::scan
              ? facet_search_scan(st.c, ray, p, st.anchor_point(), st.anchor_pos)
              : facet_search_projection(st.c, ray, p, st.first_point(),
                                        st.anchor_point(), st.anchor_pos,
                                        cfg.case1_tol, cfg.rank_tol);

      if (classify_step(ab, fc.alpha) == StepKind::bisector_hit) {
        axpy(ab, d, {x.data(), x.size()});
        r = dist(x, p);
        rep.max_updates_per_search =
            std::max<std::size_t>(rep.max_updates_per_search,
                                  qr_stats::update_count() - upd_before);
        break;
      }
      if (st.size() == 1)
        throw InvariantViolationError(
            "solve: facet step would empty the working set");
      axpy(fc.alpha, d, {x.data(), x.size()});
      st.drop_slot(fc.leaving_slot);
      ++drops;
      rep.max_updates_per_search =
          std::max<std::size_t>(rep.max_updates_per_search,
                                qr_stats::update_count() - upd_before);
      if (drops > m + 2)
        throw InvariantViolationError("solve: directional search cycled");
    }
    rep.phase_seconds.search += timer.lap();

    st.append(p_id);
    rep.radius_trace.push_back(r);
    rep.drops_per_iteration.push_back(drops);
    ++rep.iterations;

    if (cfg.validate) {
      validate_iteration(st, x, r, rep, cfg.rank_tol);
      if (orthogonality_probe(st.c) > 1e-10) {
        st.rebuild();
        ++rep.refactorizations;
      }
    }
    rep.phase_seconds.bookkeeping += timer.lap();
  }

  if (cfg.validate)
    rep.final_orthogonality_error = st.c.orthogonality_error();
  return finish(std::move(x), r, SupportSet{std::move(st.slots)});
}

}  // namespace mcball
