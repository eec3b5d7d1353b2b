#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mcball/io.hpp"
#include "mcball/solver.hpp"

namespace mcball {

struct BenchRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::string variant;
  std::size_t reps = 0;  // repetitions that solved successfully
  double mean_time_seconds = 0.0;
  double mean_iterations = 0.0;
  double mean_time_per_iteration = 0.0;
};

struct BenchSummary {
  std::vector<BenchRow> rows;
  /// Least-squares slope of log(mean time per iteration) against log(n), per
  /// variant; present when at least two distinct n were benchmarked.
  std::map<std::string, double> slopes;
};

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);
ViolatorRule parse_violator_rule(const std::string& name);

/// Runs `reps` timed solves per (spec, variant). Repetition r of a spec uses
/// a fresh instance seeded from (spec.seed, r), identical across variants so
/// the variants face the same data. Timing covers solve() only. A failing
/// solve is reported on stderr and excluded from that row's means.
BenchSummary run_bench(const std::vector<InstanceSpec>& specs,
                       const std::vector<Variant>& variants, std::size_t reps,
                       const SolverConfig& base = {});

/// CSV with one header line, one line per row, and trailing `# slope ...`
/// comment lines.
void write_bench_csv(const std::filesystem::path& path, const BenchSummary& summary);
std::vector<BenchRow> parse_bench_csv(const std::filesystem::path& path);

}  // namespace mcball
