#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>

#include "mcball/bench.hpp"
#include "mcball/io.hpp"
#include "mcball/oracle.hpp"
#include "mcball/solver.hpp"

namespace py = pybind11;

namespace {

mcball::PointSet pointset_from_array(const py::array_t<double>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 2)
    throw mcball::InputError("points must be a 2-D array of shape (m, n)");
  const auto m = static_cast<std::size_t>(buf.shape[0]);
  const auto n = static_cast<std::size_t>(buf.shape[1]);
  const auto checked = py::array_t<double, py::array::c_style | py::array::forcecast>(arr);
  const double* data = checked.data();
  return mcball::PointSet(n, std::vector<double>(data, data + m * n));
}

py::array_t<double> array_from_pointset(const mcball::PointSet& pts) {
  py::array_t<double> out({pts.count(), pts.dim()});
  double* data = out.mutable_data();
  const auto raw = pts.raw();
  std::copy(raw.begin(), raw.end(), data);
  return out;
}

py::dict solve_py(const py::array_t<double>& points, const std::string& variant,
                  double coverage_tol, const std::string& violator,
                  std::size_t max_iterations, bool validate) {
  const mcball::PointSet pts = pointset_from_array(points).deduplicated();
  mcball::SolverConfig cfg;
  cfg.variant = mcball::parse_variant(variant);
  cfg.coverage_tol = coverage_tol;
  cfg.violator_rule = mcball::parse_violator_rule(violator);
  cfg.max_iterations = max_iterations;
  cfg.validate = validate;

  const auto t0 = std::chrono::steady_clock::now();
  const mcball::SolveResult res = mcball::solve(pts, cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  py::dict out;
  out["radius"] = res.ball.radius;
  out["center"] = res.ball.center;
  out["support_indices"] = res.support.indices;
  out["iterations"] = res.report.iterations;
  out["time_seconds"] = secs;
  out["variant"] = variant;
  out["radius_trace"] = res.report.radius_trace;
  out["support_size"] = res.support.size();
  return out;
}

py::dict brute_force_py(const py::array_t<double>& points) {
  const mcball::PointSet pts = pointset_from_array(points).deduplicated();
  const auto [ball, support] = mcball::brute_force_mb(pts);
  py::dict out;
  out["radius"] = ball.radius;
  out["center"] = ball.center;
  out["support_indices"] = support.indices;
  return out;
}

py::tuple circumball_py(const py::array_t<double>& points) {
  const mcball::PointSet pts = pointset_from_array(points);
  std::vector<std::size_t> subset(pts.count());
  for (std::size_t i = 0; i < subset.size(); ++i) subset[i] = i;
  const mcball::Ball ball = mcball::circumball(pts, subset);
  return py::make_tuple(ball.center, ball.radius);
}

py::array_t<double> generate_py(std::size_t n, std::size_t m, std::uint64_t seed) {
  mcball::InstanceSpec spec;
  spec.n = n;
  spec.m = m;
  spec.seed = seed;
  return array_from_pointset(mcball::generate(spec));
}

py::array_t<double> load_points_py(const std::string& path) {
  return array_from_pointset(mcball::load_points(path).points);
}

void save_points_py(const std::string& path, const py::array_t<double>& points) {
  mcball::save_points(path, pointset_from_array(points));
}

}  // namespace

PYBIND11_MODULE(_mcball, m) {
  m.doc() = "Minimum covering ball solver (dual pivoting with incremental QR)";

  // translators run newest-first: the derived InputError must register last
  py::register_exception<mcball::Error>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<mcball::InputError>(m, "InputError", PyExc_ValueError);

  m.def("solve", &solve_py, py::arg("points"), py::arg("variant") = "projection",
        py::arg("coverage_tol") = 1e-9,
        py::arg("violator") = "farthest_filtered",
        py::arg("max_iterations") = 0, py::arg("validate") = false,
        "Solve the minimum covering ball of the rows of `points`.\n\n"
        "Returns a dict with radius, center, support_indices, iterations,\n"
        "time_seconds, variant, radius_trace and support_size.");

  m.def("brute_force_mb", &brute_force_py, py::arg("points"),
        "Exact reference solve by subset enumeration (small instances only).");

  m.def("circumball", &circumball_py, py::arg("points"),
        "Center and radius of the ball through affinely independent points.");

  m.def("generate", &generate_py, py::arg("n"), py::arg("m"), py::arg("seed"),
        "Seeded uniform unit-cube instance as an (m, n) array.");

  m.def("load_points", &load_points_py, py::arg("path"),
        "Read a point file ('m n' header, one point per row) after "
        "duplicate removal.");

  m.def("save_points", &save_points_py, py::arg("path"), py::arg("points"),
        "Write points in the plain-text instance format.");
}
