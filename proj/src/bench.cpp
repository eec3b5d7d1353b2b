#include "mcball/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcball/errors.hpp"

namespace mcball {

std::string variant_name(Variant v) {
  return v == Variant::scan ? "scan" : "projection";
}

Variant parse_variant(const std::string& name) {
  if (name == "scan") return Variant::scan;
  if (name == "projection") return Variant::projection;
  throw InputError("unknown variant '" + name + "' (expected scan|projection)");
}

ViolatorRule parse_violator_rule(const std::string& name) {
  if (name == "farthest") return ViolatorRule::farthest;
  if (name == "first") return ViolatorRule::first;
  if (name == "farthest_filtered") return ViolatorRule::farthest_filtered;
  throw InputError("unknown violator rule '" + name +
                   "' (expected farthest|first|farthest_filtered)");
}

BenchSummary run_bench(const std::vector<InstanceSpec>& specs,
                       const std::vector<Variant>& variants, std::size_t reps,
                       const SolverConfig& base) {
  if (reps < 1) throw InputError("run_bench: reps must be at least 1");
  using Clock = std::chrono::steady_clock;

  BenchSummary summary;
  for (const auto& spec : specs) {
    // Generation happens outside the timed region, once per repetition.
    std::vector<PointSet> instances;
    instances.reserve(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      InstanceSpec inst = spec;
      inst.seed = mix_seed(spec.seed, rep);
      instances.push_back(generate(inst));
    }

    for (const Variant v : variants) {
      BenchRow row;
      row.n = spec.n;
      row.m = spec.m;
      row.variant = variant_name(v);
      double time_sum = 0.0, iter_sum = 0.0, tpi_sum = 0.0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        SolverConfig cfg = base;
        cfg.variant = v;
        try {
          const auto t0 = Clock::now();
          const SolveResult res = solve(instances[rep], cfg);
          const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
          const double iters = static_cast<double>(std::max<std::size_t>(
              res.report.iterations, 1));
          time_sum += secs;
          iter_sum += iters;
          tpi_sum += secs / iters;
          ++row.reps;
        } catch (const Error& e) {
          std::cerr << "bench: solve failed (n=" << spec.n << ", m=" << spec.m
                    << ", variant=" << row.variant << ", rep=" << rep
                    << "): " << e.what() << "\n";
        }
      }
      if (row.reps > 0) {
        const double d = static_cast<double>(row.reps);
        row.mean_time_seconds = time_sum / d;
        row.mean_iterations = iter_sum / d;
        row.mean_time_per_iteration = tpi_sum / d;
      }
      summary.rows.push_back(std::move(row));
    }
  }

  // Fitted log-log slope of time-per-iteration vs n for each variant.
  for (const Variant v : variants) {
    const std::string name = variant_name(v);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (const auto& row : summary.rows) {
      if (row.variant != name || row.reps == 0 || row.mean_time_per_iteration <= 0)
        continue;
      const double lx = std::log(static_cast<double>(row.n));
      const double ly = std::log(row.mean_time_per_iteration);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    const double denom = static_cast<double>(cnt) * sxx - sx * sx;
    if (cnt >= 2 && std::abs(denom) > 1e-30)
      summary.slopes[name] = (static_cast<double>(cnt) * sxy - sx * sy) / denom;
  }
  return summary;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_bench_csv(const std::filesystem::path& path, const BenchSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("write_bench_csv: cannot open " + path.string());
  out << "n,m,variant,reps,mean_time_seconds,mean_iterations,mean_time_per_iteration\n";
  for (const auto& r : summary.rows) {
    out << r.n << ',' << r.m << ',' << r.variant << ',' << r.reps << ','
        << fmt_double(r.mean_time_seconds) << ',' << fmt_double(r.mean_iterations)
        << ',' << fmt_double(r.mean_time_per_iteration) << '\n';
  }
  for (const auto& [name, slope] : summary.slopes)
    out << "# slope variant=" << name << " value=" << fmt_double(slope) << '\n';
  if (!out.flush())
    throw InputError("write_bench_csv: write failed for " + path.string());
}

std::vector<BenchRow> parse_bench_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("parse_bench_csv: cannot open " + path.string());
  std::vector<BenchRow> rows;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    BenchRow r;
    auto take = [&]() {
      if (!std::getline(ls, field, ','))
        throw InputError(path.string() + ":" + std::to_string(lineno) +
                         ": short CSV row");
      return field;
    };
    r.n = std::stoul(take());
    r.m = std::stoul(take());
    r.variant = take();
    r.reps = std::stoul(take());
    r.mean_time_seconds = std::stod(take());
    r.mean_iterations = std::stod(take());
    r.mean_time_per_iteration = std::stod(take());
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mcball
