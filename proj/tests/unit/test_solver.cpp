#include <doctest.h>

#include <cmath>
#include <random>

#include "mcball/errors.hpp"
#include "mcball/io.hpp"
#include "mcball/oracle.hpp"
#include "mcball/solver.hpp"
#include "test_helpers.hpp"

using namespace mcball;
using namespace mcball::test;

namespace {

QrFactor factor_of_columns(const std::vector<std::vector<double>>& cols) {
  const std::size_t n = cols[0].size();
  Matrix m(n, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) m(i, c) = cols[c][i];
  return QrFactor::factor(m);
}

// C = [q_0 - a, ..., q_{t-2} - a, p - a] with a the last working point.
QrFactor difference_factor(const std::vector<std::vector<double>>& working,
                           const std::vector<double>& p) {
  const auto& a = working.back();
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j + 1 < working.size(); ++j)
    cols.push_back(sub(working[j], a));
  cols.push_back(sub(p, a));
  return factor_of_columns(cols);
}

QrFactor lifted_factor(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts[0].size();
  std::vector<std::vector<double>> cols;
  for (const auto& p : pts) {
    std::vector<double> c(p.begin(), p.end());
    c.push_back(1.0);
    cols.push_back(std::move(c));
  }
  return factor_of_columns(cols);
}

PointSet make_points(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts[0].size();
  std::vector<double> coords;
  for (const auto& p : pts) coords.insert(coords.end(), p.begin(), p.end());
  return PointSet(n, std::move(coords));
}

// Reference facet parameter: a genuine column downdate of the factor, then
// formula over the full null basis picking the direction maximizing |d^T w|.
// Returns false when every null direction is orthogonal to d (parallel ray).
bool naive_facet_alpha(const QrFactor& c_factor, const std::vector<double>& x,
                       const std::vector<double>& p,
                       const std::vector<double>& anchor,
                       const std::vector<double>& d, std::size_t slot,
                       std::size_t anchor_pos, double* alpha_out) {
  QrFactor f = c_factor;
  if (slot == anchor_pos) {
    f.delete_column(f.cols() - 1);
    if (f.cols() > 0)
      f.rank_one_update(sub(anchor, p), std::vector<double>(f.cols(), 1.0));
  } else {
    f.delete_column(slot < anchor_pos ? slot : slot - 1);
  }
  const std::size_t n = f.rows(), k = f.cols();
  const auto pmx = sub(p, x);
  double best_den = 0.0, best_num = 0.0;
  for (std::size_t c = k; c < n; ++c) {
    const auto w = f.q_column(c);
    const double den = dot(d, w);
    if (std::abs(den) > std::abs(best_den)) {
      best_den = den;
      best_num = dot(pmx, w);
    }
  }
  if (std::abs(best_den) <= 1e-12 * norm2(d)) return false;
  *alpha_out = best_num / best_den;
  return true;
}

}  // namespace

TEST_CASE("solve: two points") {
  const PointSet pts = make_points({{0, 0}, {2, 0}});
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    const auto res = solve(pts, cfg);
    CHECK(res.ball.radius == doctest::Approx(1.0));
    CHECK(res.ball.center[0] == doctest::Approx(1.0));
    CHECK(res.support.size() == 2);
  }
}

TEST_CASE("solve: interior point is never supported") {
  const PointSet pts = make_points({{0, 0}, {4, 0}, {1, 1}});
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    cfg.validate = true;
    const auto res = solve(pts, cfg);
    CHECK(res.ball.radius == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(res.ball.center[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(res.ball.center[1]) < 1e-10);
    for (std::size_t idx : res.support.indices) CHECK(idx != 2);
  }
}

TEST_CASE("solve: unit square corners") {
  const PointSet pts = make_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    cfg.validate = true;
    const auto res = solve(pts, cfg);
    CHECK(res.ball.radius == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(res.ball.center[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res.ball.center[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("solve: single point and coincident points") {
  const auto res1 = solve(make_points({{3, 4, 5}}));
  CHECK(res1.ball.radius == 0.0);
  CHECK(res1.support.size() == 1);

  const auto res2 = solve(make_points({{1, 1}, {1, 1}, {1, 1}}));
  CHECK(res2.ball.radius == 0.0);
}

TEST_CASE("select_violator: rules") {
  const PointSet pts = make_points({{0, 0}, {3, 0}, {5, 0}});
  const Ball ball{{0.0, 0.0}, 1.0};
  CHECK(select_violator(pts, ball, ViolatorRule::first, 1e-9) == 1);
  CHECK(select_violator(pts, ball, ViolatorRule::farthest, 1e-9) == 2);

  const Ball covers_all{{2.5, 0.0}, 2.5 + 1e-6};
  CHECK_FALSE(
      select_violator(pts, covers_all, ViolatorRule::farthest, 1e-9).has_value());

  const Ball one_out{{0.0, 0.0}, 4.0};
  CHECK(select_violator(pts, one_out, ViolatorRule::first, 1e-9) == 2);
  CHECK(select_violator(pts, one_out, ViolatorRule::farthest_filtered, 1e-9) == 2);
}

TEST_CASE("select_violator: hull filter skips near-hull candidates") {
  // two uncovered points: the farther one sits on the working set's hull
  // (the x-axis), the nearer one does not.
  const PointSet pts = make_points({{0, 0}, {2, 0}, {9, 0}, {5, 3}});
  const Ball ball{{1.0, 0.0}, 1.0};
  const auto c = factor_of_columns({{2.0, 0.0}});  // span of the hull direction
  const std::vector<double> anchor{0.0, 0.0};
  const AffineHullView hull{c, 1, anchor};

  CHECK(select_violator(pts, ball, ViolatorRule::farthest, 1e-9) == 2);
  CHECK(select_violator(pts, ball, ViolatorRule::farthest_filtered, 1e-9, &hull,
                        0.5) == 3);
  // when every candidate is close to the hull, fall back to the farthest
  const PointSet flat = make_points({{0, 0}, {2, 0}, {9, 0}, {5, 0}});
  CHECK(select_violator(flat, ball, ViolatorRule::farthest_filtered, 1e-9, &hull,
                        0.5) == 2);
}

TEST_CASE("ratio_test_drop: collinear entering point") {
  // pi = (0.5, 0.5); omega solves 2*om_1 = -3, sum -1 -> (0.5, -1.5);
  // only slot 1 has a negative omega, so it leaves.
  const auto b = lifted_factor({{0.0, 0.0}, {2.0, 0.0}});
  const std::size_t k = ratio_test_drop(b, std::vector<double>{1.0, 0.0},
                                        std::vector<double>{3.0, 0.0});
  CHECK(k == 1);
}

TEST_CASE("ratio_test_drop: all omegas nonnegative is a breakdown") {
  // p = -1 on the axis: omega = (-1.5, 0.5), candidates = {slot 0}
  const auto b = lifted_factor({{0.0, 0.0}, {2.0, 0.0}});
  CHECK(ratio_test_drop(b, std::vector<double>{1.0, 0.0},
                        std::vector<double>{-1.0, 0.0}) == 0);
}

TEST_CASE("compute_direction: hand-solved 2-D case") {
  // working set {(0,0),(2,0)}, entering (1,2):
  // d must kill (q0 - a) and satisfy (p - a)^T d = 1 -> d = (0, 0.5)
  const auto c = difference_factor({{0.0, 0.0}, {2.0, 0.0}}, {1.0, 2.0});
  const auto d = compute_direction(c);
  CHECK(d[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("compute_direction: scalar case") {
  const auto c = difference_factor({{0.0}}, {2.0});
  const auto d = compute_direction(c);
  CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("compute_direction: defining residuals on random instances") {
  std::mt19937_64 eng(101);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + eng() % 8;
    const std::size_t t = 1 + eng() % std::min<std::size_t>(n, 5);
    std::vector<std::vector<double>> w(t);
    for (auto& q : w) q = random_vector(n, eng);
    const auto p = random_vector(n, eng);
    const auto c = difference_factor(w, p);
    const auto d = compute_direction(c);

    const auto& a = w.back();
    for (std::size_t j = 0; j + 1 < t; ++j)
      CHECK(std::abs(dot(sub(w[j], a), d)) <= 1e-9);
    CHECK(std::abs(dot(sub(p, a), d) - 1.0) <= 1e-9);
    const Matrix u = null_basis(c);
    for (std::size_t col = 0; col < u.cols(); ++col) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += u(i, col) * d[i];
      CHECK(std::abs(s) <= 1e-9);
    }
  }
}

TEST_CASE("alpha_bisector: derived value and equidistance") {
  // support {(0,-1)}, x at the origin, r = 1, entering (3,0)
  const std::vector<double> x{0.0, 0.0}, p{3.0, 0.0}, a{0.0, -1.0};
  const double ab = alpha_bisector(x, 1.0, p);
  CHECK(ab == doctest::Approx(4.0));

  const auto c = difference_factor({a}, p);
  const auto d = compute_direction(c);
  std::vector<double> xb = x;
  axpy(ab, d, xb);
  CHECK(std::abs(dist(xb, p) - dist(xb, a)) <= 1e-9);
}

TEST_CASE("alpha_bisector: entering point on the boundary") {
  CHECK(alpha_bisector(std::vector<double>{0.0, 0.0}, 1.0,
                       std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("alpha_bisector: random states stay equidistant") {
  std::mt19937_64 eng(103);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + eng() % 6;
    const std::size_t t = 1 + eng() % std::min<std::size_t>(n, 4);
    std::vector<std::vector<double>> w(t);
    for (auto& q : w) q = random_vector(n, eng);
    const auto p = random_vector(n, eng);

    // equidistant center: the circumcenter of the working set
    const Ball cb = circumball(w);
    const std::vector<double>& x = cb.center;
    const double r = cb.radius;

    const auto c = difference_factor(w, p);
    const auto d = compute_direction(c);
    const double ab = alpha_bisector(x, r, p);
    std::vector<double> xb = x;
    axpy(ab, d, xb);
    const double dp = dist(xb, p);
    for (const auto& q : w)
      CHECK(std::abs(dist(xb, q) - dp) <= 1e-9 * (1.0 + dp));
  }
}

TEST_CASE("facet searches: isoceles triangle, both variants agree") {
  const std::vector<std::vector<double>> w{{0.0, 0.0}, {2.0, 0.0}};
  const std::vector<double> p{1.0, 2.0}, x{1.0, 0.0};
  const auto c = difference_factor(w, p);
  const auto d = compute_direction(c);
  const std::size_t anchor_pos = 1;

  const Ray ray{x, d};
  const auto scan = facet_search_scan(c, ray, p, w[1], anchor_pos);
  CHECK(scan.alpha == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(scan.leaving_slot == 0);  // tie between the side facets, lowest slot

  const auto proj = facet_search_projection(c, ray, p, w[0], w[1], anchor_pos);
  CHECK(proj.alpha == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(proj.leaving_slot == 0);

  // the bisector lands first here: alpha_b = (4 - 1)/2
  const double ab = alpha_bisector(x, 1.0, p);
  CHECK(ab == doctest::Approx(1.5));
  CHECK(classify_step(ab, scan.alpha) == StepKind::bisector_hit);
}

TEST_CASE("facet searches: center already on a facet gives alpha 0") {
  const std::vector<std::vector<double>> w{{0.0, 0.0}, {2.0, 0.0}};
  const std::vector<double> p{1.0, 2.0}, x{0.0, 0.0};  // x is a working point
  const auto c = difference_factor(w, p);
  const auto d = compute_direction(c);

  const Ray ray{x, d};
  const auto scan = facet_search_scan(c, ray, p, w[1], 1);
  CHECK(scan.alpha == doctest::Approx(0.0));
  CHECK(scan.leaving_slot == 1);
  const auto proj = facet_search_projection(c, ray, p, w[0], w[1], 1);
  CHECK(proj.alpha == doctest::Approx(0.0));
  CHECK(proj.leaving_slot == 1);
}

TEST_CASE("facet search: perpendicular facet resolved by the coefficient test") {
  // right angle at q2 = (1,1,0); the center projects onto the q0-q1 edge and
  // so does the entering point directly above it. The facet opposed to q2 is
  // perpendicular to the working-set hull.
  const std::vector<std::vector<double>> w{
      {0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
  const std::vector<double> p{1.0, 0.0, 3.0}, x{1.0, 0.0, 0.0};
  const auto c = difference_factor(w, p);
  const auto d = compute_direction(c);

  const Ray ray{x, d};
  const auto proj = facet_search_projection(c, ray, p, w[0], w[2], 2);
  CHECK(proj.alpha == 0.0);
  CHECK(proj.leaving_slot == 2);
  CHECK(proj.perpendicular);

  // the exhaustive scan cannot see that facet (0/0) and reports the others
  const auto scan = facet_search_scan(c, ray, p, w[2], 2);
  CHECK(scan.alpha == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("facet search scan matches a genuine per-facet downdate") {
  std::mt19937_64 eng(107);
  int degenerate_states = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 3 + eng() % 6;
    const std::size_t t = 2 + eng() % std::min<std::size_t>(n - 1, 4);
    std::vector<std::vector<double>> w(t);
    for (auto& q : w) q = random_vector(n, eng);
    const auto p = random_vector(n, eng);
    const Ball cb = circumball(w);
    const auto c = difference_factor(w, p);
    const auto d = compute_direction(c);
    const std::size_t anchor_pos = t - 1;

    // reference winner: smallest nonnegative per-facet parameter from the
    // full downdate route
    bool any = false;
    double best_alpha = 0.0;
    std::size_t best_slot = 0;
    for (std::size_t slot = 0; slot < t; ++slot) {
      double a = 0.0;
      if (!naive_facet_alpha(c, cb.center, p, w.back(), d, slot, anchor_pos, &a))
        continue;
      if (a < -1e-12) continue;
      a = std::max(a, 0.0);
      if (!any || a < best_alpha) {
        any = true;
        best_alpha = a;
        best_slot = slot;
      }
    }

    const Ray ray{cb.center, d};
    if (!any) {
      ++degenerate_states;
      CHECK_THROWS_AS((void)facet_search_scan(c, ray, p, w.back(), anchor_pos),
                      NumericalDegeneracyError);
      continue;
    }
    const auto scan = facet_search_scan(c, ray, p, w.back(), anchor_pos);
    CHECK(scan.alpha == doctest::Approx(best_alpha).epsilon(1e-9));
    const bool slot_match = scan.leaving_slot == best_slot;
    double alt = 0.0;
    const bool tie =
        naive_facet_alpha(c, cb.center, p, w.back(), d, scan.leaving_slot,
                          anchor_pos, &alt) &&
        std::abs(alt - best_alpha) <= 1e-9 * (1.0 + best_alpha);
    CHECK((slot_match || tie));
  }
  CHECK(degenerate_states < 30);  // most random states are well posed
}

TEST_CASE("facet hit lands on the facet: the leaving coefficient vanishes") {
  // on every facet-branch search, the stepped center written over the
  // working set plus the entering point must have a zero coefficient at
  // exactly the leaving point and remain a convex combination
  struct FacetProbe : SearchObserver {
    std::size_t facet_hits = 0;
    void on_search(const DirectionalSearchView& view) override {
      const Ray ray{{view.x.begin(), view.x.end()},
                    {view.direction.begin(), view.direction.end()}};
      const auto fc = facet_search_scan(view.c_factor, ray, view.p, view.anchor,
                                        view.anchor_pos);
      if (classify_step(view.alpha_bisector, fc.alpha) != StepKind::facet_hit)
        return;
      ++facet_hits;
      std::vector<double> stepped(view.x.begin(), view.x.end());
      axpy(fc.alpha, view.direction, stepped);
      const std::size_t t = view.support.size();
      // diff_cols = t maps the entering column to a virtual slot t
      const auto coeffs = working_set_coeffs(view.c_factor, t, view.anchor_pos,
                                             view.anchor, stepped, 1.0);
      CHECK(std::abs(coeffs[fc.leaving_slot]) <= 1e-8);
      for (std::size_t j = 0; j < coeffs.size(); ++j)
        CHECK(coeffs[j] >= -1e-8);
    }
  } probe;

  std::mt19937_64 eng(131);
  for (int rep = 0; rep < 60 && probe.facet_hits < 50; ++rep) {
    InstanceSpec spec;
    spec.n = 3 + eng() % 6;
    spec.m = spec.n + 4 + eng() % 30;
    spec.seed = eng();
    SolverConfig cfg;
    cfg.observer = &probe;
    (void)solve(generate(spec), cfg);
  }
  CHECK(probe.facet_hits >= 20);
}

TEST_CASE("classify_step: exact ties take the facet branch") {
  CHECK(classify_step(1.0, 1.0) == StepKind::facet_hit);
  CHECK(classify_step(1.0, 1.0 + 1e-9) == StepKind::bisector_hit);
  CHECK(classify_step(2.0, 1.0) == StepKind::facet_hit);
}

TEST_CASE("warm start: acute triangle finishes in one iteration at the circumcenter") {
  const PointSet pts = make_points({{0, 0}, {2, 0}, {1, 2}});
  WarmStart warm{SupportSet{{0, 1}}, Ball{{1.0, 0.0}, 1.0}};
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    cfg.validate = true;
    const auto res = solve(pts, cfg, warm);
    CHECK(res.ball.center[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.ball.center[1] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(res.ball.radius == doctest::Approx(1.25).epsilon(1e-10));
    CHECK(res.report.iterations == 1);
    CHECK(res.support.size() == 3);
  }
}

TEST_CASE("warm start: facet hit drops a working point on the way") {
  // entering (-1,1) from the two-point ball of {(0,0),(4,0)}: the ray exits
  // through the facet opposed to (0,0) at alpha 0.4, the point is dropped,
  // and the final ball is the two-point ball of {(4,0),(-1,1)}.
  const PointSet pts = make_points({{0, 0}, {4, 0}, {-1, 1}});
  WarmStart warm{SupportSet{{0, 1}}, Ball{{2.0, 0.0}, 2.0}};
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    cfg.validate = true;
    const auto res = solve(pts, cfg, warm);
    CHECK(res.ball.center[0] == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(res.ball.center[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(res.ball.radius == doctest::Approx(std::sqrt(6.5)).epsilon(1e-10));
    REQUIRE(res.support.size() == 2);
    CHECK(res.report.drops_per_iteration.back() >= 1);
    // the dropped point is covered but off the support
    for (std::size_t idx : res.support.indices) CHECK(idx != 0);
  }
}

TEST_CASE("warm start: bisector case keeps the full working set") {
  // entering (1,3): the circumcenter (2,1) lies inside the triangle, so the
  // bisector is reached first and no point leaves.
  const PointSet pts = make_points({{0, 0}, {4, 0}, {1, 3}});
  WarmStart warm{SupportSet{{0, 1}}, Ball{{2.0, 0.0}, 2.0}};
  const auto res = solve(pts, SolverConfig{}, warm);
  CHECK(res.ball.center[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(res.ball.center[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.ball.radius == doctest::Approx(std::sqrt(5.0)).epsilon(1e-10));
  CHECK(res.support.size() == 3);
  CHECK(res.report.drops_per_iteration.back() == 0);
}

TEST_CASE("full working set: dependent entry resolved by ratio test") {
  // warm start on the acute triangle's circumball; the fourth point lies in
  // the plane, so with n + 1 working points the entry is dependent. The tie
  // in the ratio test breaks to slot 0, the next search exits through a facet
  // at alpha 0, and the final ball rests on the two vertical points.
  const PointSet pts = make_points({{0, 0}, {2, 0}, {1, 2}, {1, -2}});
  WarmStart warm{SupportSet{{0, 1, 2}}, Ball{{1.0, 0.75}, 1.25}};
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    cfg.validate = true;
    const auto res = solve(pts, cfg, warm);
    CHECK(res.ball.radius == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.ball.center[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(res.ball.center[1]) < 1e-12);
    CHECK(res.report.iterations == 1);
    CHECK(res.report.drops_per_iteration.back() == 2);
    REQUIRE(res.support.size() == 2);
    CHECK(res.support.indices[0] == 2);
    CHECK(res.support.indices[1] == 3);
  }
}

TEST_CASE("right triangle: the boundary-degenerate corner leaves the support") {
  const PointSet pts = make_points({{0, 0}, {4, 0}, {0, 3}});
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    const auto res = solve(pts, cfg);
    CHECK(res.ball.radius == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(res.ball.center[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(res.ball.center[1] == doctest::Approx(1.5).epsilon(1e-10));
  }
}

TEST_CASE("solve agrees with the enumeration oracle on random instances") {
  std::mt19937_64 eng(109);
  for (int rep = 0; rep < 50; ++rep) {
    InstanceSpec spec;
    spec.n = 2 + eng() % 4;
    spec.m = 4 + eng() % 9;
    spec.seed = eng();
    const PointSet pts = generate(spec).deduplicated();
    if (pts.count() < 2) continue;
    const auto [oracle_ball, oracle_support] = brute_force_mb(pts);
    for (const Variant v : {Variant::scan, Variant::projection}) {
      SolverConfig cfg;
      cfg.variant = v;
      cfg.validate = true;
      const auto res = solve(pts, cfg);
      CHECK(std::abs(res.ball.radius - oracle_ball.radius) <=
            1e-8 * (1.0 + oracle_ball.radius));
    }
  }
}

TEST_CASE("solve report: factorization budget and invariants") {
  std::mt19937_64 eng(113);
  InstanceSpec spec;
  spec.n = 8;
  spec.m = 60;
  spec.seed = 424242;
  const PointSet pts = generate(spec);
  for (const Variant v : {Variant::scan, Variant::projection}) {
    SolverConfig cfg;
    cfg.variant = v;
    cfg.validate = true;
    const auto res = solve(pts, cfg);
    CHECK(res.report.qr_factorizations == 1);
    CHECK(res.report.refactorizations == 0);
    CHECK(res.report.final_orthogonality_error <= 1e-8);
    for (std::size_t i = 1; i < res.report.radius_trace.size(); ++i)
      CHECK(res.report.radius_trace[i] > res.report.radius_trace[i - 1] - 1e-12);
    // every input point is covered
    const double limit =
        res.ball.radius * (1.0 + cfg.coverage_tol) + cfg.coverage_tol;
    for (std::size_t i = 0; i < pts.count(); ++i)
      CHECK(dist(pts.point(i), res.ball.center) <= limit);
    // support points on the boundary, coefficients a convex combination
    for (std::size_t idx : res.support.indices)
      CHECK(std::abs(dist(pts.point(idx), res.ball.center) - res.ball.radius) <=
            1e-8 * (1.0 + res.ball.radius));
  }
}

TEST_CASE("per-search update counts separate the variants") {
  InstanceSpec spec;
  spec.n = 16;
  spec.m = 120;
  spec.seed = 777;
  const PointSet pts = generate(spec);

  SolverConfig proj;
  proj.variant = Variant::projection;
  const auto rp = solve(pts, proj);

  SolverConfig scan;
  scan.variant = Variant::scan;
  const auto rs = solve(pts, scan);

  CHECK(rp.report.max_updates_per_search <= 8);
  CHECK(rs.report.max_updates_per_search > rp.report.max_updates_per_search);
  // one lazy downdate per working point makes the scan cost grow with s
  CHECK(rs.report.max_updates_per_search + 2 >= rs.support.size());
}

TEST_CASE("variant radii agree on random instances") {
  std::mt19937_64 eng(127);
  for (int rep = 0; rep < 25; ++rep) {
    InstanceSpec spec;
    spec.n = 2 + eng() % 12;
    spec.m = spec.n + 2 + eng() % 40;
    spec.seed = eng();
    const PointSet pts = generate(spec);
    SolverConfig a, b;
    a.variant = Variant::scan;
    b.variant = Variant::projection;
    const auto ra = solve(pts, a);
    const auto rb = solve(pts, b);
    CHECK(std::abs(ra.ball.radius - rb.ball.radius) <=
          1e-9 * (1.0 + ra.ball.radius));
  }
}

TEST_CASE("degenerate geometries: shells, grids, flats, large scales") {
  std::mt19937_64 eng(7777);
  std::normal_distribution<double> gauss;
  auto run_both = [&](const PointSet& raw) {
    const PointSet pts = raw.deduplicated();
    double oracle_r = -1.0;
    if (pts.count() <= 12 && pts.dim() <= 6)
      oracle_r = brute_force_mb(pts).first.radius;
    for (const Variant v : {Variant::scan, Variant::projection}) {
      SolverConfig cfg;
      cfg.variant = v;
      cfg.validate = true;
      const auto res = solve(pts, cfg);
      if (oracle_r >= 0.0)
        CHECK(std::abs(res.ball.radius - oracle_r) <= 1e-8 * (1.0 + oracle_r));
      CHECK(res.report.qr_factorizations == 1);
    }
  };

  // unit-sphere shells: every point is a support candidate
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t n = 2 + eng() % 4, m = 4 + eng() % 9;
    std::vector<double> coords;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> v(n);
      double nn = 0.0;
      for (auto& x : v) {
        x = gauss(eng);
        nn += x * x;
      }
      nn = std::sqrt(nn);
      for (auto& x : v) coords.push_back(x / nn);
    }
    run_both(PointSet(n, std::move(coords)));
  }

  // integer grid: exact distance ties everywhere
  {
    std::vector<double> coords;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        coords.push_back(a);
        coords.push_back(b);
      }
    run_both(PointSet(2, std::move(coords)));
  }

  // collinear and coplanar clouds embedded in higher dimension
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 3 + eng() % 4, m = 3 + eng() % 8;
    std::vector<double> base(n), dir(n);
    for (auto& x : base) x = gauss(eng);
    for (auto& x : dir) x = gauss(eng);
    std::vector<double> coords;
    for (std::size_t i = 0; i < m; ++i) {
      const double s = gauss(eng);
      for (std::size_t j = 0; j < n; ++j) coords.push_back(base[j] + s * dir[j]);
    }
    run_both(PointSet(n, std::move(coords)));
  }
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 5, m = 5 + eng() % 8;
    std::vector<double> b0(n), d1(n), d2(n);
    for (auto& x : b0) x = gauss(eng);
    for (auto& x : d1) x = gauss(eng);
    for (auto& x : d2) x = gauss(eng);
    std::vector<double> coords;
    for (std::size_t i = 0; i < m; ++i) {
      const double s = gauss(eng), t2 = gauss(eng);
      for (std::size_t j = 0; j < n; ++j)
        coords.push_back(b0[j] + s * d1[j] + t2 * d2[j]);
    }
    run_both(PointSet(n, std::move(coords)));
  }

  // coordinates far above unit scale: tolerances track max-abs
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + eng() % 3, m = 4 + eng() % 8;
    std::vector<double> coords;
    for (std::size_t i = 0; i < m * n; ++i) coords.push_back(1e8 * gauss(eng));
    run_both(PointSet(n, std::move(coords)));
  }
}

TEST_CASE("every violator rule reaches the same optimum") {
  std::mt19937_64 eng(137);
  for (int rep = 0; rep < 10; ++rep) {
    InstanceSpec spec;
    spec.n = 2 + eng() % 4;
    spec.m = 5 + eng() % 8;
    spec.seed = eng();
    const PointSet pts = generate(spec);
    const double oracle_r = brute_force_mb(pts).first.radius;
    for (const ViolatorRule rule : {ViolatorRule::farthest, ViolatorRule::first,
                                    ViolatorRule::farthest_filtered}) {
      SolverConfig cfg;
      cfg.violator_rule = rule;
      cfg.validate = true;
      const auto res = solve(pts, cfg);
      CHECK(std::abs(res.ball.radius - oracle_r) <= 1e-8 * (1.0 + oracle_r));
    }
  }
}

TEST_CASE("iteration cap raises a diagnostic carrying the trace") {
  InstanceSpec spec;
  spec.n = 4;
  spec.m = 30;
  spec.seed = 5;
  const PointSet pts = generate(spec);
  SolverConfig cfg;
  cfg.max_iterations = 1;
  try {
    (void)solve(pts, cfg);
    FAIL("expected IterationLimitError");
  } catch (const IterationLimitError& e) {
    CHECK(e.report.iterations == 1);
    CHECK(e.report.radius_trace.size() == 2);
  }
}

TEST_CASE("warm start validation") {
  const PointSet pts = make_points({{0, 0}, {2, 0}, {1, 2}});
  const Ball ball{{1.0, 0.0}, 1.0};
  CHECK_THROWS_AS((void)solve(pts, {}, WarmStart{SupportSet{{0, 0}}, ball}),
                  InputError);
  CHECK_THROWS_AS((void)solve(pts, {}, WarmStart{SupportSet{{0, 7}}, ball}),
                  InputError);
  CHECK_THROWS_AS((void)solve(pts, {}, WarmStart{SupportSet{{}}, ball}),
                  InputError);
  CHECK_THROWS_AS(
      (void)solve(pts, {}, WarmStart{SupportSet{{0, 1}}, Ball{{1.0}, 1.0}}),
      InputError);
}

TEST_CASE("observer sees every directional search") {
  struct Counter : SearchObserver {
    std::size_t searches = 0;
    void on_search(const DirectionalSearchView& view) override {
      ++searches;
      CHECK(view.c_factor.cols() == view.support.size());
      CHECK(view.alpha_bisector >= -1e-12);
    }
  } counter;

  InstanceSpec spec;
  spec.n = 5;
  spec.m = 40;
  spec.seed = 99;
  const PointSet pts = generate(spec);
  SolverConfig cfg;
  cfg.observer = &counter;
  const auto res = solve(pts, cfg);
  CHECK(counter.searches == res.report.directional_searches);
  CHECK(counter.searches >= res.report.iterations);
}
