// Command-line front end: solve an instance file, generate instances, and run
// timing sweeps. Exit codes: 0 ok, 1 input error, 2 numerical failure,
// 3 iteration cap reached.

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcball/bench.hpp"
#include "mcball/io.hpp"
#include "mcball/oracle.hpp"
#include "mcball/solver.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int run_solve(const std::string& input, const std::string& variant, double tol,
              const std::string& violator, bool as_json) {
  const mcball::LoadResult loaded = mcball::load_points(input);
  if (loaded.duplicates_removed > 0)
    std::cerr << "warning: dropped " << loaded.duplicates_removed
              << " duplicate point(s)\n";

  mcball::SolverConfig cfg;
  cfg.variant = mcball::parse_variant(variant);
  cfg.coverage_tol = tol;
  cfg.violator_rule = mcball::parse_violator_rule(violator);

  const auto t0 = std::chrono::steady_clock::now();
  const mcball::SolveResult res = mcball::solve(loaded.points, cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (as_json) {
    json out;
    out["radius"] = res.ball.radius;
    out["center"] = res.ball.center;
    out["support_indices"] = res.support.indices;
    out["iterations"] = res.report.iterations;
    out["time_seconds"] = secs;
    out["variant"] = variant;
    std::cout << out.dump() << "\n";
  } else {
    std::cout << "radius      " << res.ball.radius << "\n"
              << "iterations  " << res.report.iterations << "\n"
              << "support     " << res.support.size() << " point(s):";
    for (std::size_t i : res.support.indices) std::cout << ' ' << i;
    std::cout << "\ntime        " << secs << " s\n";
  }
  return 0;
}

int run_gen(std::size_t n, std::size_t m, std::uint64_t seed,
            const std::string& out_path) {
  mcball::InstanceSpec spec;
  spec.n = n;
  spec.m = m;
  spec.seed = seed;
  mcball::save_points(out_path, mcball::generate(spec));
  return 0;
}

int run_bench_cmd(const std::string& n_list, std::size_t m, std::size_t reps,
                  const std::string& variants_csv, const std::string& csv_path,
                  std::uint64_t seed) {
  std::vector<mcball::InstanceSpec> specs;
  for (const auto& tok : split_list(n_list)) {
    mcball::InstanceSpec spec;
    spec.n = std::stoul(tok);
    spec.m = m;
    spec.seed = seed;
    specs.push_back(spec);
  }
  if (specs.empty()) throw mcball::InputError("bench: empty --n-list");

  std::vector<mcball::Variant> variants;
  for (const auto& tok : split_list(variants_csv))
    variants.push_back(mcball::parse_variant(tok));
  if (variants.empty()) throw mcball::InputError("bench: empty --variants");

  const mcball::BenchSummary summary = mcball::run_bench(specs, variants, reps);
  if (!csv_path.empty()) mcball::write_bench_csv(csv_path, summary);

  std::cout << "n,m,variant,reps,mean_time_seconds,mean_iterations,"
               "mean_time_per_iteration\n";
  for (const auto& r : summary.rows)
    std::cout << r.n << ',' << r.m << ',' << r.variant << ',' << r.reps << ','
              << r.mean_time_seconds << ',' << r.mean_iterations << ','
              << r.mean_time_per_iteration << "\n";
  for (const auto& [name, slope] : summary.slopes)
    std::cout << "# slope variant=" << name << " value=" << slope << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euclidean minimum covering ball solver"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  std::string input, variant = "projection", violator = "farthest_filtered";
  double tol = 1e-9;
  bool as_json = false;
  solve_cmd->add_option("--input", input, "point file")->required();
  solve_cmd->add_option("--variant", variant, "scan|projection");
  solve_cmd->add_option("--tol", tol, "relative coverage tolerance");
  solve_cmd->add_option("--violator", violator,
                        "farthest|first|farthest_filtered");
  solve_cmd->add_flag("--json", as_json, "emit a JSON object on stdout");

  auto* gen_cmd = app.add_subcommand("gen", "generate a uniform-cube instance");
  std::size_t gn = 2, gm = 10;
  std::uint64_t gseed = 0;
  std::string gout;
  gen_cmd->add_option("--n", gn, "dimension")->required();
  gen_cmd->add_option("--m", gm, "number of points")->required();
  gen_cmd->add_option("--seed", gseed, "RNG seed")->required();
  gen_cmd->add_option("--out", gout, "output file")->required();

  auto* bench_cmd = app.add_subcommand("bench", "timing sweep over dimensions");
  std::string n_list, variants_csv = "scan,projection", csv_path;
  std::size_t bm = 1000, reps = 3;
  std::uint64_t bseed = 12345;
  bench_cmd->add_option("--n-list", n_list, "comma-separated dimensions")->required();
  bench_cmd->add_option("--m", bm, "points per instance");
  bench_cmd->add_option("--reps", reps, "repetitions per configuration");
  bench_cmd->add_option("--variants", variants_csv, "comma-separated variants");
  bench_cmd->add_option("--csv", csv_path, "write rows to this CSV file");
  bench_cmd->add_option("--seed", bseed, "base RNG seed");

  try {
    app.parse(argc, argv);
    if (solve_cmd->parsed()) return run_solve(input, variant, tol, violator, as_json);
    if (gen_cmd->parsed()) return run_gen(gn, gm, gseed, gout);
    if (bench_cmd->parsed())
      return run_bench_cmd(n_list, bm, reps, variants_csv, csv_path, bseed);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const mcball::IterationLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mcball::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mcball::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
