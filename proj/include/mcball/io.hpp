#pragma once

#include <cstdint>
#include <filesystem>

#include "mcball/geometry.hpp"

namespace mcball {

struct LoadResult {
  PointSet points;
  std::size_t duplicates_removed = 0;
};

/// Reads the plain-text point format: a header line `m n`, then m lines of n
/// whitespace-separated decimals. Lines whose first non-space character is
/// `#` are comments. Exact duplicate points are dropped (first occurrence
/// kept); fewer than two distinct points is an error.
LoadResult load_points(const std::filesystem::path& path);

/// Writes the same format with round-trip-exact precision.
void save_points(const std::filesystem::path& path, const PointSet& pts);

enum class Distribution { unit_cube_uniform };

struct InstanceSpec {
  std::size_t n = 2;
  std::size_t m = 2;
  Distribution distribution = Distribution::unit_cube_uniform;
  std::uint64_t seed = 0;
};

/// Seeded instance generation. Draws come from mt19937_64 mapped to [0, 1)
/// by taking the top 53 bits, point-major, so a fixed seed reproduces the
/// same coordinates on any platform.
PointSet generate(const InstanceSpec& spec);

/// splitmix64 step, used to derive per-repetition seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace mcball
