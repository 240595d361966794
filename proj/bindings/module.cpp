#include "risolve/errors.hpp"
#include "risolve/harness.hpp"
#include "risolve/json_io.hpp"
#include "risolve/zero_dim.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

namespace py = pybind11;
using namespace risolve;

namespace {

ScalarMode mode_from_string(const std::string& mode) {
    if (mode == "weak") return ScalarMode::weak;
    if (mode == "strong") return ScalarMode::strong;
    if (mode == "extended") return ScalarMode::extended;
    throw Error("unknown mode: " + mode);
}

ProblemSpec spec_from_json_str(const std::string& text) {
    return spec_from_json(nlohmann::json::parse(text));
}

} // namespace

PYBIND11_MODULE(_risolve, m) {
    m.doc() = "solver and verification harness for rate-independent quasistatic evolutions";

    py::register_exception<Error>(m, "SolverError");

    // zero-dimensional model
    m.def("exact_solution",
          [](const std::string& mode, double t) { return exact_solution(mode_from_string(mode), t); },
          py::arg("mode"), py::arg("t"));
    m.def("step_global", &step_global, py::arg("u_prev"), py::arg("t_k"), py::arg("tau"));
    m.def("step_local",
          [](double u_prev, double t_k, double tau, int prev_branch) {
              const auto r = step_local(u_prev, t_k, tau, prev_branch);
              return py::make_tuple(r.value, r.branch_exit);
          },
          py::arg("u_prev"), py::arg("t_k"), py::arg("tau"), py::arg("prev_branch") = -1);
    m.def("scalar_pde_reference",
          [](double x, double t) {
              const auto r = scalar_pde_reference(x, t);
              return py::make_tuple(r.value, r.gradient);
          },
          py::arg("x"), py::arg("t"));
    m.def("stability_check",
          [](double t, double u, const std::string& kind) {
              return stability_check(t, u, kind == "local" ? StabilityKind::local
                                                           : StabilityKind::global);
          },
          py::arg("t"), py::arg("u"), py::arg("kind"));

    py::class_<ScalarTrajectory>(m, "ScalarTrajectory")
        .def_readonly("times", &ScalarTrajectory::times)
        .def_readonly("values", &ScalarTrajectory::values)
        .def_readonly("tag", &ScalarTrajectory::tag)
        .def_readonly("branch_exited", &ScalarTrajectory::branch_exited)
        .def_readonly("exit_time", &ScalarTrajectory::exit_time);
    m.def("sample_exact",
          [](const std::string& mode, double tau, double T) {
              return sample_exact(mode_from_string(mode), tau, T);
          },
          py::arg("mode"), py::arg("tau"), py::arg("T"));
    m.def("run_scalar_global", &run_scalar_global, py::arg("tau"), py::arg("T"),
          py::arg("u0") = -1.0);
    m.def("run_scalar_local", &run_scalar_local, py::arg("tau"), py::arg("T"),
          py::arg("u0") = -1.0);
    m.def("energy_balance_residual", &energy_balance_residual, py::arg("trajectory"));

    // meshes and spaces
    py::class_<SimplicialMesh>(m, "Mesh")
        .def_readonly("dim", &SimplicialMesh::dim)
        .def_readonly("h", &SimplicialMesh::h)
        .def_readonly("rho", &SimplicialMesh::rho)
        .def_property_readonly("num_vertices", &SimplicialMesh::num_vertices)
        .def_property_readonly("num_cells", &SimplicialMesh::num_cells)
        .def("to_json", [](const SimplicialMesh& mesh) { return mesh_to_json(mesh).dump(); });
    m.def("unit_interval", &unit_interval, py::arg("n"));
    m.def("unit_square", &unit_square, py::arg("n"));
    m.def("refine", &refine, py::arg("mesh"));

    py::class_<FemSpace>(m, "FemSpace")
        .def_readonly("n_nodes", &FemSpace::n_nodes)
        .def_property_readonly("n_dofs", &FemSpace::n_dofs);
    m.def("make_space", [](const SimplicialMesh& mesh, int m_) { return make_space(mesh, m_); },
          py::arg("mesh"), py::arg("m") = 1);
    m.def("poincare_constant",
          [](const FemSpace& space) { return poincare_constant(space); }, py::arg("space"));

    // problems
    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("d", &ProblemSpec::d)
        .def_readonly("m", &ProblemSpec::m)
        .def_readonly("T", &ProblemSpec::T);
    m.def("problem_from_json", &spec_from_json_str, py::arg("text"),
          "build a problem from a JSON document of named presets");
    m.def("check_admissibility",
          [](const ProblemSpec& spec, double poincare) {
              const auto rep = check_admissibility(spec, poincare);
              py::list checks;
              for (const auto& c : rep.checks) {
                  py::dict d;
                  d["name"] = c.name;
                  d["pass"] = c.pass;
                  d["margin"] = c.margin;
                  d["detail"] = c.detail;
                  checks.append(d);
              }
              py::dict out;
              out["checks"] = checks;
              out["mu_cp_margin"] = rep.mu_cp_margin;
              out["gate_ok"] = rep.gate_ok;
              out["all_pass"] = rep.all_pass;
              return out;
          },
          py::arg("spec"), py::arg("poincare_constant"));

    // evolution
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("tau", &Trajectory::tau)
        .def_readonly("times", &Trajectory::times)
        .def_readonly("initial_stable", &Trajectory::initial_stable)
        .def_readonly("initial_margin", &Trajectory::initial_margin)
        .def("field", [](const Trajectory& t, int k) { return t.fields.at(k).coeffs; },
             py::arg("k"))
        .def("evaluate",
             [](const Trajectory& t, double time, std::vector<double> x, int comp) {
                 return t.evaluate(time, x.data(), comp);
             },
             py::arg("t"), py::arg("x"), py::arg("comp") = 0)
        .def("steps", &Trajectory::steps);
    m.def("run",
          [](const ProblemSpec& spec, const FemSpace& space, int n_steps, double tolerance) {
              RunOptions opts;
              opts.step.tolerance = tolerance;
              return run(spec, space, n_steps, opts);
          },
          py::arg("spec"), py::arg("space"), py::arg("n_steps"), py::arg("tolerance") = 1e-10);

    // harness
    m.def("error_l2h1_vs_reference",
          [](const Trajectory& traj) { return error_l2h1(traj, pde_reference_exact()); },
          py::arg("trajectory"),
          "squared space-time error against the built-in 1-d manufactured solution");
    m.def("pde_reference_problem", &pde_reference_problem, py::arg("T") = 2.0);
    m.def("fit_rate",
          [](const std::vector<std::pair<double, double>>& pts) {
              const auto fit = fit_rate(pts);
              py::dict out;
              out["slope"] = fit.slope;
              out["intercept"] = fit.intercept;
              out["r_squared"] = fit.r_squared;
              return out;
          },
          py::arg("points"));
    m.def("discrete_sobolev_ratio",
          [](const FemSpace& space, int trials, std::uint64_t seed) {
              return discrete_sobolev_ratio(space, identity_tensor(space.mesh.dim, space.m), 0.0,
                                            trials, 6, seed);
          },
          py::arg("space"), py::arg("trials") = 50, py::arg("seed") = 2718281828ULL);
    m.def("uniqueness_probe",
          [](const ProblemSpec& spec, const FemSpace& space, int n_steps, double perturbation) {
              return uniqueness_probe(spec, space, n_steps, perturbation);
          },
          py::arg("spec"), py::arg("space"), py::arg("n_steps"), py::arg("perturbation"));

    m.attr("__version__") = "0.1.0";
}
