#include "mcball/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mcball/errors.hpp"

namespace mcball {

namespace {

bool is_comment_or_blank(const std::string& line) {
  for (char ch : line) {
    if (ch == ' ' || ch == '\t' || ch == '\r') continue;
    return ch == '#';
  }
  return true;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t lineno,
                             const std::string& why) {
  throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + why);
}

}  // namespace

LoadResult load_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("load_points: cannot open " + path.string());

  std::string line;
  std::size_t lineno = 0;

  auto next_data_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!is_comment_or_blank(line)) return true;
    }
    return false;
  };

  if (!next_data_line()) parse_fail(path, lineno + 1, "missing 'm n' header");
  std::size_t m = 0, n = 0;
  {
    std::istringstream hs(line);
    long long mv = -1, nv = -1;
    std::string extra;
    if (!(hs >> mv >> nv) || (hs >> extra) || mv < 1 || nv < 1)
      parse_fail(path, lineno, "header must be two positive integers 'm n'");
    m = static_cast<std::size_t>(mv);
    n = static_cast<std::size_t>(nv);
  }

  std::vector<double> coords;
  coords.reserve(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    if (!next_data_line())
      parse_fail(path, lineno + 1,
                 "expected " + std::to_string(m) + " point rows, got " +
                     std::to_string(i));
    const char* cur = line.c_str();
    for (std::size_t j = 0; j < n; ++j) {
      char* end = nullptr;
      const double v = std::strtod(cur, &end);
      if (end == cur)
        parse_fail(path, lineno,
                   "expected " + std::to_string(n) + " values in point row");
      coords.push_back(v);
      cur = end;
    }
    while (*cur == ' ' || *cur == '\t' || *cur == '\r') ++cur;
    if (*cur != '\0')
      parse_fail(path, lineno, "trailing data after " + std::to_string(n) + " values");
  }
  if (next_data_line()) parse_fail(path, lineno, "unexpected data after point rows");

  PointSet raw(n, std::move(coords));
  std::size_t removed = 0;
  PointSet pts = raw.deduplicated(&removed);
  if (pts.count() < 2)
    throw InputError("load_points: fewer than two distinct points in " +
                     path.string());
  return {std::move(pts), removed};
}

void save_points(const std::filesystem::path& path, const PointSet& pts) {
  std::ofstream out(path, std::ios::binary);  // keep '\n' endings everywhere
  if (!out) throw InputError("save_points: cannot open " + path.string());
  out << pts.count() << ' ' << pts.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < pts.count(); ++i) {
    const auto p = pts.point(i);
    for (std::size_t j = 0; j < pts.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", p[j]);
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out.flush()) throw InputError("save_points: write failed for " + path.string());
}

PointSet generate(const InstanceSpec& spec) {
  if (spec.n < 1) throw InputError("generate: dimension must be at least 1");
  if (spec.m < 2) throw InputError("generate: need at least two points");
  std::mt19937_64 eng(spec.seed);
  std::vector<double> coords(spec.n * spec.m);
  for (double& c : coords)
    c = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return PointSet(spec.n, std::move(coords));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace mcball
