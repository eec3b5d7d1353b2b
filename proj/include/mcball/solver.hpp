#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcball/errors.hpp"
#include "mcball/geometry.hpp"
#include "mcball/qr.hpp"

namespace mcball {

enum class Variant { scan, projection };
enum class ViolatorRule { farthest, first, farthest_filtered };

struct SearchObserver;

struct SolverConfig {
  Variant variant = Variant::projection;
  /// Relative coverage slack: p counts as covered when
  /// dist(p, x) <= r * (1 + coverage_tol) + coverage_tol.
  double coverage_tol = 1e-9;
  /// Base rank tolerance; every diagonal test scales it by 1 + max-abs.
  double rank_tol = 1e-10;
  /// Threshold for the perpendicular-facet short-circuit in the projection
  /// search (both coefficients of a working point vanish).
  double case1_tol = 1e-10;
  ViolatorRule violator_rule = ViolatorRule::farthest_filtered;
  /// Safety cap on outer iterations; 0 means 10 * (n + 2) * m.
  std::size_t max_iterations = 0;
  /// Enables per-iteration invariant checks and drift-triggered
  /// refactorization. Keep off for timing runs.
  bool validate = false;
  SearchObserver* observer = nullptr;  // not owned
};

struct PhaseTimes {
  double violator = 0.0;
  double support_update = 0.0;
  double search = 0.0;
  double bookkeeping = 0.0;
  double total = 0.0;
};

struct SolveReport {
  std::size_t iterations = 0;
  std::vector<double> radius_trace;  // initial ball, then one entry per iteration
  std::vector<std::size_t> drops_per_iteration;
  std::size_t support_size_final = 0;
  std::size_t directional_searches = 0;
  std::uint64_t qr_factorizations = 0;
  std::uint64_t qr_updates = 0;
  std::size_t max_updates_per_search = 0;
  std::size_t refactorizations = 0;
  double final_orthogonality_error = 0.0;  // populated in validate mode
  PhaseTimes phase_seconds;
};

struct SolveResult {
  Ball ball;
  SupportSet support;
  SolveReport report;
};

struct WarmStart {
  SupportSet support;
  Ball ball;
};

/// The outer-iteration cap was hit; carries the partial trace for diagnosis.
struct IterationLimitError : Error {
  IterationLimitError(const std::string& what, SolveReport rep)
      : Error(what), report(std::move(rep)) {}
  SolveReport report;
};

enum class StepKind { bisector_hit, facet_hit };

struct SearchOutcome {
  StepKind kind = StepKind::bisector_hit;
  double alpha = 0.0;
  std::optional<std::size_t> leaving_slot;  // present iff facet_hit
};

/// Tie rule: equal intersection parameters take the facet branch.
inline StepKind classify_step(double alpha_b, double alpha_f) {
  return alpha_b < alpha_f ? StepKind::bisector_hit : StepKind::facet_hit;
}

/// One facet-search result before comparison against the bisector parameter.
struct FacetCandidate {
  double alpha = 0.0;
  std::size_t leaving_slot = 0;
  bool perpendicular = false;  // resolved by the zero-coefficient short-circuit
};

/// State handed to a SearchObserver at the top of every directional search.
/// Spans are valid only during the callback. The working set has t points
/// (slots 0..t-1); slot anchor_pos anchors the difference columns, and the
/// entering point's difference occupies the last column of c_factor.
struct DirectionalSearchView {
  const QrFactor& c_factor;
  std::span<const double> x;
  std::span<const double> p;
  std::span<const double> first_point;
  std::span<const double> anchor;
  std::span<const double> direction;
  double alpha_bisector;
  std::span<const std::size_t> support;
  std::size_t anchor_pos;
};

struct SearchObserver {
  virtual ~SearchObserver() = default;
  virtual void on_search(const DirectionalSearchView& view) = 0;
};

/// Orthonormal view of a working set's affine hull, for violator filtering.
struct AffineHullView {
  const QrFactor& basis_factor;  // leading Q columns span the hull directions
  std::size_t sub_dim;
  std::span<const double> anchor;
};

/// Picks an uncovered point per `rule`, or nullopt when everything is covered.
/// farthest_filtered skips candidates closer than min_hull_distance to the
/// hull (when provided) unless no candidate qualifies.
std::optional<std::size_t> select_violator(const PointSet& pts, const Ball& ball,
                                           ViolatorRule rule, double coverage_tol,
                                           const AffineHullView* hull = nullptr,
                                           double min_hull_distance = 0.0);

/// Ratio test for a dependent entering point p: with pi the coefficients of
/// the center over the working set and omega those of -p (sum -1), returns
/// argmin pi_j / (-omega_j) over omega_j < 0 — the point whose removal keeps
/// the center inside the hull of the remaining points plus p. Ties break to
/// the smallest slot.
std::size_t ratio_test_drop(const QrFactor& b_factor, std::span<const double> x,
                            std::span<const double> p,
                            double rank_tol = qr_tol::rank);

/// Direction of the next line search, read off the factor of the difference
/// matrix C = [q_0 - a, ..., q_{t-2} - a, p - a]: orthogonal to every working
/// difference, inside span(C), and scaled so (p - a)^T d = 1.
std::vector<double> compute_direction(const QrFactor& c_factor,
                                      double rank_tol = qr_tol::rank);

/// Parameter at which the moving center becomes equidistant from the entering
/// point and the working set, assuming (p - a)^T d = 1:
///   alpha_b = (||p - x||^2 - r_cur^2) / 2.
double alpha_bisector(std::span<const double> x, double r_cur,
                      std::span<const double> p);

/// Exhaustive facet search: intersects the ray with every facet opposed to a
/// working point, each via one downdate of the C factor evaluated on scratch
/// copies of the rows the rotations touch.
FacetCandidate facet_search_scan(const QrFactor& c_factor, const Ray& ray,
                                 std::span<const double> p,
                                 std::span<const double> anchor,
                                 std::size_t anchor_pos);

/// Affine coefficients of y over the working points, computed against the
/// difference factor: the anchored system D lambda = y - anchor determines
/// every non-anchor coefficient; the anchor absorbs target_sum - sum(lambda).
std::vector<double> working_set_coeffs(const QrFactor& c_factor,
                                       std::size_t diff_cols,
                                       std::size_t anchor_pos,
                                       std::span<const double> anchor,
                                       std::span<const double> y,
                                       double target_sum,
                                       double rank_tol = qr_tol::rank);

/// Projection facet search: identifies at most two candidate facets from the
/// affine coefficients of the projected center and entering point, then
/// intersects only those.
FacetCandidate facet_search_projection(const QrFactor& c_factor, const Ray& ray,
                                       std::span<const double> p,
                                       std::span<const double> first_point,
                                       std::span<const double> anchor,
                                       std::size_t anchor_pos,
                                       double case1_tol = 1e-10,
                                       double rank_tol = qr_tol::rank);

/// Dual pivoting solve of the minimum covering ball.
SolveResult solve(const PointSet& pts, const SolverConfig& cfg = {},
                  const std::optional<WarmStart>& warm = std::nullopt);

}  // namespace mcball
