#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bergman/errors.hpp"
#include "bergman/kernel.hpp"
#include "bergman/luqikeng.hpp"
#include "bergman/projection.hpp"
#include "bergman/transforms.hpp"

namespace py = pybind11;
using namespace bergman;
using namespace pybind11::literals;

namespace {

using Pairs = std::vector<std::pair<ComplexPoint, ComplexPoint>>;

KernelEvaluator pick_kernel(const EllipsoidSpec& spec, int cap, const std::string& kernels) {
  if (kernels == "auto") {
    if (auto k = closed_form_evaluator(spec)) return *k;
  } else if (kernels != "series") {
    throw std::invalid_argument("kernels must be 'auto' or 'series', got '" + kernels + "'");
  }
  return series_evaluator(build_series(spec, cap));
}

std::string repr_spec(const EllipsoidSpec& s) { return "EllipsoidSpec(m=(" + to_string(s) + "))"; }

} // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Bergman kernels of generalized complex ellipsoids";

  py::register_exception<DimensionError>(mod, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
  py::register_exception<SingularInputError>(mod, "SingularInputError", PyExc_ValueError);
  py::register_exception<BranchPointError>(mod, "BranchPointError", PyExc_ValueError);
  py::register_exception<ResourceError>(mod, "ResourceError", PyExc_MemoryError);

  py::class_<EllipsoidSpec>(mod, "EllipsoidSpec")
      .def(py::init<std::vector<double>>(), "m"_a)
      .def_static("ball", &EllipsoidSpec::ball, "n"_a)
      .def_property_readonly("n", &EllipsoidSpec::dim)
      .def_property_readonly("m", &EllipsoidSpec::exponents)
      .def("scaled", &EllipsoidSpec::scaled, "j"_a)
      .def("contains", [](const EllipsoidSpec& s, const ComplexPoint& p) { return contains(s, p); }, "p"_a)
      .def("defect", [](const EllipsoidSpec& s, const ComplexPoint& p) { return defect(s, p); }, "p"_a)
      .def("__eq__", [](const EllipsoidSpec& a, const EllipsoidSpec& b) { return a == b; })
      .def("__repr__", &repr_spec);

  mod.def("log_moment", [](const EllipsoidSpec& s, std::vector<int> alpha) { return log_moment(s, MultiIndex(std::move(alpha))); },
          "spec"_a, "alpha"_a, "log of the squared L2 norm of z^alpha");
  mod.def("volume", &volume, "spec"_a);

  py::class_<EvalResult>(mod, "EvalResult")
      .def_readonly("value", &EvalResult::value)
      .def_readonly("tail_bound", &EvalResult::tail_bound)
      .def_readonly("rounding_bound", &EvalResult::rounding_bound)
      .def_readonly("valid", &EvalResult::valid)
      .def_property_readonly("error_bound", &EvalResult::error_bound);

  py::class_<KernelSeries>(mod, "KernelSeries")
      .def_property_readonly("spec", &KernelSeries::spec)
      .def_property_readonly("cap", &KernelSeries::cap)
      .def("__len__", &KernelSeries::size)
      .def("log_coeff", [](const KernelSeries& k, std::vector<int> a) { return k.log_coeff(MultiIndex(std::move(a))); }, "alpha"_a)
      .def("coeff", [](const KernelSeries& k, std::vector<int> a) { return k.coeff(MultiIndex(std::move(a))); }, "alpha"_a)
      .def("indices",
           [](const KernelSeries& k) {
             std::vector<std::vector<int>> rows;
             for (std::size_t r = 0; r < k.size(); ++r) rows.push_back(k.index(r).entries());
             return rows;
           })
      .def("log_coeffs", [](const KernelSeries& k) { return std::vector<double>(k.log_coeffs().begin(), k.log_coeffs().end()); })
      .def("__call__", [](const KernelSeries& k, const ComplexPoint& z, const ComplexPoint& w) { return eval_kernel(k, z, w); },
           "z"_a, "w"_a)
      .def("reinhardt", [](const KernelSeries& k, const ComplexPoint& t) { return eval_reinhardt(k, t); }, "t"_a);

  mod.def("build_series", [](const EllipsoidSpec& s, int cap) { return build_series(s, cap); }, "spec"_a, "cap"_a);
  mod.def("eval_kernel", [](const KernelSeries& k, const ComplexPoint& z, const ComplexPoint& w) { return eval_kernel(k, z, w); },
          "series"_a, "z"_a, "w"_a);
  mod.def("ball_kernel", [](const ComplexPoint& z, const ComplexPoint& w) { return ball_kernel_closed(z, w, z.size()); }, "z"_a,
          "w"_a);
  mod.def("polydisc_kernel", [](const ComplexPoint& z, const ComplexPoint& w) { return polydisc_kernel_closed(z, w); }, "z"_a,
          "w"_a);

  py::class_<HoloMap>(mod, "HoloMap")
      .def_static("rotation", &HoloMap::rotation, "spec"_a, "angles"_a)
      .def_static("permutation", &HoloMap::permutation, "spec"_a, "sigma"_a)
      .def_static("ball_automorphism", &HoloMap::ball_automorphism, "center"_a)
      .def_static("power_map", &HoloMap::power_map, "target"_a, "j"_a)
      .def_static("compose", &HoloMap::compose, "maps"_a)
      .def_property_readonly("source", &HoloMap::source)
      .def_property_readonly("target", &HoloMap::target)
      .def("is_biholomorphic", &HoloMap::is_biholomorphic)
      .def("inverse", &HoloMap::inverse)
      .def("__call__", [](const HoloMap& m, const ComplexPoint& z) { return m.apply(z); }, "z"_a)
      .def("jacobian_det", [](const HoloMap& m, const ComplexPoint& z) { return m.jacobian_det(z); }, "z"_a)
      .def("__repr__", &HoloMap::describe);

  py::class_<PairResidual>(mod, "PairResidual")
      .def_readonly("z", &PairResidual::z)
      .def_readonly("zeta", &PairResidual::zeta)
      .def_readonly("lhs", &PairResidual::lhs)
      .def_readonly("rhs", &PairResidual::rhs)
      .def_readonly("residual", &PairResidual::residual)
      .def_readonly("tail_bound", &PairResidual::tail_bound);
  py::class_<TransformCheck>(mod, "TransformCheck")
      .def_readonly("map", &TransformCheck::map)
      .def_readonly("max_residual", &TransformCheck::max_residual)
      .def_readonly("rows", &TransformCheck::rows);
  py::class_<CoveringCheck>(mod, "CoveringCheck")
      .def_readonly("j", &CoveringCheck::j)
      .def_readonly("z", &CoveringCheck::z)
      .def_readonly("w", &CoveringCheck::w)
      .def_readonly("lhs", &CoveringCheck::lhs)
      .def_readonly("rhs", &CoveringCheck::rhs)
      .def_readonly("tail_bound", &CoveringCheck::tail_bound)
      .def_readonly("residual", &CoveringCheck::residual);

  mod.def(
      "check_biholomorphic_law",
      [](const HoloMap& map, const Pairs& pairs, int cap, const std::string& kernels) {
        const auto ks = pick_kernel(map.source(), cap, kernels);
        const auto kt = map.source() == map.target() ? ks : pick_kernel(map.target(), cap, kernels);
        return check_biholomorphic_law(map, ks, kt, pairs);
      },
      "map"_a, "pairs"_a, "cap"_a = 60, "kernels"_a = "auto");
  mod.def(
      "check_bell_covering_law",
      [](int j, const EllipsoidSpec& target, const ComplexPoint& z, const ComplexPoint& w, int source_cap, int target_cap,
         const std::string& kernels) {
        return check_bell_covering_law(j, target, z, w, pick_kernel(target.scaled(j), source_cap, kernels),
                                       pick_kernel(target, target_cap, kernels));
      },
      "j"_a, "target"_a, "z"_a, "w"_a, "source_cap"_a = 60, "target_cap"_a = 60, "kernels"_a = "auto");

  py::class_<TestFunction>(mod, "TestFunction")
      .def_static("constant", &TestFunction::constant, "value"_a)
      .def_static("monomial", [](std::vector<int> a) { return TestFunction::monomial(MultiIndex(std::move(a))); }, "alpha"_a)
      .def_static("anti_holomorphic_monomial",
                  [](std::vector<int> a) { return TestFunction::anti_holomorphic_monomial(MultiIndex(std::move(a))); }, "alpha"_a)
      .def_static("radial_bump", &TestFunction::radial_bump, "radius"_a)
      .def_static("bump", &TestFunction::bump, "center"_a, "radius"_a)
      .def_static("product", &TestFunction::product, "factors"_a)
      .def("__call__", [](const TestFunction& g, const EllipsoidSpec& s, const ComplexPoint& z) { return g(s, z); }, "spec"_a,
           "z"_a)
      .def("__repr__", &TestFunction::describe);

  py::class_<QuadratureGrid>(mod, "QuadratureGrid")
      .def(py::init<EllipsoidSpec, std::size_t, std::size_t>(), "spec"_a, "radial"_a = 48, "angular"_a = 64)
      .def_property_readonly("spec", &QuadratureGrid::spec)
      .def_property_readonly("radial", &QuadratureGrid::radial_nodes)
      .def_property_readonly("angular", &QuadratureGrid::angular_nodes)
      .def("total_weight", &QuadratureGrid::total_weight)
      .def("refined", &QuadratureGrid::refined);

  py::class_<ProjectedFunction>(mod, "ProjectedFunction")
      .def_readonly("spec", &ProjectedFunction::spec)
      .def_readonly("cap", &ProjectedFunction::cap)
      .def_readonly("coefficients", &ProjectedFunction::coefficients)
      .def_readonly("refinement_checked", &ProjectedFunction::refinement_checked)
      .def_readonly("unstable", &ProjectedFunction::unstable)
      .def_readonly("refinement_delta", &ProjectedFunction::refinement_delta)
      .def("coefficient", [](const ProjectedFunction& pf, std::vector<int> a) { return pf.coefficient(MultiIndex(std::move(a))); },
           "alpha"_a)
      .def("__call__", [](const ProjectedFunction& pf, const ComplexPoint& z) { return pf(z); }, "z"_a);

  mod.def(
      "project",
      [](const TestFunction& g, const QuadratureGrid& grid, int cap, bool check_refinement, double refinement_tol) {
        return project(g, grid, cap, ProjectOptions{check_refinement, refinement_tol});
      },
      "g"_a, "grid"_a, "cap"_a, "check_refinement"_a = false, "refinement_tol"_a = 1e-8, py::call_guard<py::gil_scoped_release>());

  py::class_<ContinuationEstimate>(mod, "ContinuationEstimate")
      .def_readonly("radius", &ContinuationEstimate::radius)
      .def_readonly("finite_degree", &ContinuationEstimate::finite_degree)
      .def_readonly("low_confidence", &ContinuationEstimate::low_confidence)
      .def_readonly("nonzero", &ContinuationEstimate::nonzero);
  mod.def("continuation_radius_proxy", &continuation_radius_proxy, "pf"_a, "top_layers"_a = 3, "noise_rel"_a = 1e-12);

  py::class_<IdentitySample>(mod, "IdentitySample")
      .def_readonly("z", &IdentitySample::z)
      .def_readonly("lhs", &IdentitySample::lhs)
      .def_readonly("rhs", &IdentitySample::rhs)
      .def_readonly("residual", &IdentitySample::residual);
  py::class_<IdentityCheck>(mod, "IdentityCheck")
      .def_readonly("map", &IdentityCheck::map)
      .def_readonly("max_residual", &IdentityCheck::max_residual)
      .def_readonly("rows", &IdentityCheck::rows);
  mod.def("bell_projection_identity_check", &bell_projection_identity_check, "map"_a, "g"_a, "source_grid"_a, "target_grid"_a,
          "cap"_a, "samples"_a, py::call_guard<py::gil_scoped_release>());
  mod.def("default_sample_points", &default_sample_points, "spec"_a, "count"_a, "max_defect"_a = 0.25, "seed"_a = 17);

  py::enum_<SearchStatus>(mod, "SearchStatus")
      .value("ZeroFound", SearchStatus::ZeroFound)
      .value("PositiveOnSearch", SearchStatus::PositiveOnSearch)
      .value("Uncertified", SearchStatus::Uncertified);

  py::class_<SearchConfig>(mod, "SearchConfig")
      .def(py::init([](int cap, std::size_t starts, std::uint64_t seed, std::size_t max_iters, double delta,
                       double zero_threshold_rel) {
             SearchConfig c;
             c.cap = cap;
             c.starts = starts;
             c.seed = seed;
             c.max_iters = max_iters;
             c.delta = delta;
             c.zero_threshold_rel = zero_threshold_rel;
             c.validate();
             return c;
           }),
           "cap"_a = 60, "starts"_a = 64, "seed"_a = 1, "max_iters"_a = 3000, "delta"_a = 0.25, "zero_threshold_rel"_a = 1e-10)
      .def_readwrite("cap", &SearchConfig::cap)
      .def_readwrite("starts", &SearchConfig::starts)
      .def_readwrite("seed", &SearchConfig::seed)
      .def_readwrite("max_iters", &SearchConfig::max_iters)
      .def_readwrite("delta", &SearchConfig::delta)
      .def_readwrite("zero_threshold_rel", &SearchConfig::zero_threshold_rel);

  py::class_<SearchReport>(mod, "SearchReport")
      .def_readonly("min_abs", &SearchReport::min_abs)
      .def_readonly("argmin_t", &SearchReport::argmin_t)
      .def_readonly("evaluations", &SearchReport::evaluations)
      .def_readonly("status", &SearchReport::status)
      .def_readonly("margin", &SearchReport::margin)
      .def_readonly("error_bound", &SearchReport::error_bound)
      .def_readonly("zero_threshold", &SearchReport::zero_threshold)
      .def_readonly("best_start", &SearchReport::best_start)
      .def_readonly("cap", &SearchReport::cap);

  mod.def("zero_search", py::overload_cast<const EllipsoidSpec&, const SearchConfig&>(&zero_search), "spec"_a,
          "config"_a = SearchConfig{}, py::call_guard<py::gil_scoped_release>());
  mod.def("zero_search", py::overload_cast<const KernelSeries&, const SearchConfig&>(&zero_search), "series"_a,
          "config"_a = SearchConfig{}, py::call_guard<py::gil_scoped_release>());
  mod.def("doctored_disc_series", &doctored_disc_series, "cap"_a = 60);

  py::class_<TransferReport>(mod, "TransferReport")
      .def_readonly("j", &TransferReport::j)
      .def_readonly("upstairs", &TransferReport::upstairs)
      .def_readonly("downstairs", &TransferReport::downstairs)
      .def_readonly("upstairs_search", &TransferReport::upstairs_search)
      .def_readonly("downstairs_search", &TransferReport::downstairs_search)
      .def_readonly("covering", &TransferReport::covering)
      .def_readonly("consistent", &TransferReport::consistent);
  mod.def(
      "zero_transfer_experiment",
      [](const std::vector<double>& m, int j, const SearchConfig& cfg, double tol) { return zero_transfer_experiment(m, j, cfg, tol); },
      "m"_a, "j"_a, "config"_a = SearchConfig{}, "covering_tol"_a = 1e-6, py::call_guard<py::gil_scoped_release>());

  py::class_<RamadanovRow>(mod, "RamadanovRow")
      .def_readonly("j", &RamadanovRow::j)
      .def_readonly("point", &RamadanovRow::point)
      .def_readonly("p", &RamadanovRow::p)
      .def_readonly("value", &RamadanovRow::value)
      .def_readonly("limit", &RamadanovRow::limit)
      .def_readonly("abs_diff", &RamadanovRow::abs_diff)
      .def_readonly("rel_diff", &RamadanovRow::rel_diff)
      .def_readonly("cap", &RamadanovRow::cap)
      .def_readonly("tail_bound", &RamadanovRow::tail_bound);
  py::class_<RamadanovTable>(mod, "RamadanovTable")
      .def_readonly("m", &RamadanovTable::m)
      .def_readonly("j_list", &RamadanovTable::j_list)
      .def_readonly("rows", &RamadanovTable::rows)
      .def_readonly("eventually_decreasing", &RamadanovTable::eventually_decreasing);
  mod.def(
      "ramadanov_experiment",
      [](const std::vector<double>& m, std::vector<int> j_list, const std::vector<ComplexPoint>& points, double rel_tol) {
        return ramadanov_experiment(m, std::move(j_list), points, rel_tol);
      },
      "m"_a, "j_list"_a, "points"_a, "rel_tol"_a = 1e-13);
}
