#include "mcball/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mcball/errors.hpp"
#include "mcball/qr.hpp"

namespace mcball {

namespace {

// Solves for the circumcenter given the factored difference matrix of the
// subset: center = p0 + D lambda with (D^T D) lambda = c / 2,
// c_i = ||p_i - p0||^2, via two triangular solves against R.
Ball circumball_from_factor(const PointSet& pts,
                            std::span<const std::size_t> subset,
                            const QrFactor& diff_factor,
                            std::vector<double>* coeffs_out) {
  const std::size_t k = subset.size();
  const auto p0 = pts.point(subset[0]);

  Ball ball;
  ball.center.assign(p0.begin(), p0.end());
  if (coeffs_out) coeffs_out->assign(k, 0.0);

  if (k == 1) {
    if (coeffs_out) (*coeffs_out)[0] = 1.0;
    return ball;
  }

  std::vector<double> half_sq(k - 1);
  for (std::size_t i = 1; i < k; ++i)
    half_sq[i - 1] = 0.5 * dist2(pts.point(subset[i]), p0);

  const std::vector<double> y =
      solve_lower_transposed(diff_factor.r(), half_sq);
  const std::vector<double> lambda = solve_upper(diff_factor.r(), y);

  for (std::size_t i = 1; i < k; ++i) {
    const std::vector<double> diff = sub(pts.point(subset[i]), p0);
    axpy(lambda[i - 1], diff, ball.center);
  }
  ball.radius = dist(ball.center, p0);

  if (coeffs_out) {
    double lsum = 0.0;
    for (std::size_t i = 1; i < k; ++i) {
      (*coeffs_out)[i] = lambda[i - 1];
      lsum += lambda[i - 1];
    }
    (*coeffs_out)[0] = 1.0 - lsum;
  }
  return ball;
}

Matrix difference_matrix(const PointSet& pts, std::span<const std::size_t> subset) {
  const std::size_t k = subset.size();
  Matrix d(pts.dim(), k - 1);
  const auto p0 = pts.point(subset[0]);
  for (std::size_t c = 1; c < k; ++c) {
    const auto pc = pts.point(subset[c]);
    for (std::size_t i = 0; i < pts.dim(); ++i) d(i, c - 1) = pc[i] - p0[i];
  }
  return d;
}

constexpr double kCoeffSlack = 1e-10;

}  // namespace

Ball circumball(const PointSet& pts, std::span<const std::size_t> subset) {
  if (subset.empty()) throw InputError("circumball: empty subset");
  if (subset.size() == 1) {
    const auto p0 = pts.point(subset[0]);
    return {{p0.begin(), p0.end()}, 0.0};
  }
  const QrFactor f = QrFactor::factor(difference_matrix(pts, subset));
  if (!f.full_column_rank())
    throw DegenerateSupportError("circumball: points are affinely dependent");
  return circumball_from_factor(pts, subset, f, nullptr);
}

Ball circumball(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw InputError("circumball: empty input");
  const std::size_t n = points[0].size();
  std::vector<double> coords;
  coords.reserve(points.size() * n);
  for (const auto& p : points) {
    if (p.size() != n) throw InputError("circumball: inconsistent dimensions");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  PointSet pts(n, std::move(coords));
  std::vector<std::size_t> subset(points.size());
  for (std::size_t i = 0; i < subset.size(); ++i) subset[i] = i;
  return circumball(pts, subset);
}

std::vector<CandidateBall> enumerate_candidates(const PointSet& pts) {
  const std::size_t n = pts.dim(), m = pts.count();
  if (m > 16 || n > 7)
    throw InputError("enumerate_candidates: instance too large for enumeration");

  std::vector<CandidateBall> out;
  const std::size_t kmax = std::min(n + 1, m);
  std::vector<std::size_t> subset;
  std::vector<double> coeffs;

  for (std::size_t k = 1; k <= kmax; ++k) {
    subset.resize(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = i;
    while (true) {
      bool independent = true;
      Ball ball;
      if (k == 1) {
        const auto p0 = pts.point(subset[0]);
        ball = {{p0.begin(), p0.end()}, 0.0};
        coeffs.assign(1, 1.0);
      } else {
        const QrFactor f = QrFactor::factor(difference_matrix(pts, subset));
        if (f.full_column_rank())
          ball = circumball_from_factor(pts, subset, f, &coeffs);
        else
          independent = false;
      }
      if (independent) {
        const double limit = ball.radius + kCoeffSlack * (1.0 + ball.radius);
        bool covers = true;
        for (std::size_t i = 0; i < m && covers; ++i)
          covers = dist(pts.point(i), ball.center) <= limit;
        if (covers) {
          const bool interior =
              std::all_of(coeffs.begin(), coeffs.end(),
                          [](double c) { return c >= -kCoeffSlack; });
          out.push_back({std::move(ball), SupportSet{subset}, interior});
        }
      }
      // next k-combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && subset[i - 1] == m - k + (i - 1)) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  return out;
}

std::pair<Ball, SupportSet> brute_force_mb(const PointSet& pts) {
  const auto candidates = enumerate_candidates(pts);
  const CandidateBall* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.interior_ok) continue;
    if (!best || c.ball.radius < best->ball.radius) best = &c;
  }
  if (!best)
    throw InvariantViolationError(
        "brute_force_mb: no covering candidate with a hull-interior center");
  return {best->ball, best->subset};
}

}  // namespace mcball
