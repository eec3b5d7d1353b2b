#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mcball/geometry.hpp"

namespace mcball {

/// One enumerated covering ball: the circumball of an affinely independent
/// subset, with a flag recording whether the center's coefficients over the
/// subset are all nonnegative.
struct CandidateBall {
  Ball ball;
  SupportSet subset;
  bool interior_ok = false;
};

/// Center in the affine hull of the given affinely independent points,
/// equidistant from all of them. Throws DegenerateSupportError on dependent
/// input.
Ball circumball(const PointSet& pts, std::span<const std::size_t> subset);
Ball circumball(const std::vector<std::vector<double>>& points);

/// Every circumball over an affinely independent subset that covers the whole
/// set, in size-then-lexicographic enumeration order.
std::vector<CandidateBall> enumerate_candidates(const PointSet& pts);

/// Reference solve by exhaustive enumeration; rejects instances beyond a small
/// size guard. Used to validate the pivoting solver, so it shares none of its
/// update machinery.
std::pair<Ball, SupportSet> brute_force_mb(const PointSet& pts);

}  // namespace mcball
