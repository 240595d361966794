#include "risolve/errors.hpp"
#include "risolve/harness.hpp"
#include "risolve/json_io.hpp"
#include "risolve/zero_dim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw risolve::Error("cannot write " + path.string());
    out << text;
}

int cmd_zero_dim(const std::string& mode, double tau, double T, const std::string& out_path) {
    using namespace risolve;
    ScalarTrajectory traj;
    if (mode == "weak")
        traj = sample_exact(ScalarMode::weak, tau, T);
    else if (mode == "strong")
        traj = sample_exact(ScalarMode::strong, tau, T);
    else if (mode == "extended")
        traj = sample_exact(ScalarMode::extended, tau, T);
    else if (mode == "global")
        traj = run_scalar_global(tau, T);
    else if (mode == "local")
        traj = run_scalar_local(tau, T);
    else
        throw Error("zero-dim: unknown mode " + mode);

    const auto defects = energy_balance_defects(traj);
    std::string csv = "t,u,locally_stable,globally_stable,balance_defect\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k], u = traj.values[k];
        csv += num(t) + "," + num(u) + "," +
               (stability_check(t, u, StabilityKind::local) ? "1" : "0") + "," +
               (stability_check(t, u, StabilityKind::global) ? "1" : "0") + "," +
               num(defects[k]) + "\n";
    }
    write_text(out_path, csv);
    if (traj.branch_exited)
        std::cerr << "note: local stepper left its convex branch at t=" << traj.exit_time
                  << "; output truncated there\n";
    std::cout << "wrote " << out_path << " (" << traj.times.size() << " rows, residual "
              << energy_balance_residual(traj) << ")\n";
    return 0;
}

int cmd_run(const risolve::RunConfig& cfg, int n_space, int n_time, const std::string& out_dir) {
    using namespace risolve;
    fs::create_directories(out_dir);
    const FemSpace space = build_space(cfg.problem, n_space);

    RunOptions opts;
    opts.step = cfg.step;
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = run(cfg.problem, space, n_time, opts);
    const double solve_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!traj.initial_stable)
        std::cerr << "warning: initial datum is not incrementally stable (margin "
                  << traj.initial_margin << ")\n";

    // checkpoints: about ten evenly spaced plus the final state
    const int stride = std::max(1, n_time / 10);
    std::vector<int> checkpoints;
    for (int k = 0; k < n_time; k += stride) checkpoints.push_back(k);
    checkpoints.push_back(n_time);
    int written = 0;
    for (int k : checkpoints) {
        char name[64];
        std::snprintf(name, sizeof(name), "u_%06d.csv", k);
        std::string csv = (space.mesh.dim == 1) ? "x" : "x,y";
        for (int c = 0; c < space.m; ++c) csv += ",u" + std::to_string(c);
        csv += "\n";
        for (int v = 0; v < space.mesh.num_vertices(); ++v) {
            csv += num(space.mesh.vertices[v][0]);
            if (space.mesh.dim == 2) csv += "," + num(space.mesh.vertices[v][1]);
            const int node = space.vertex_to_node[v];
            for (int c = 0; c < space.m; ++c)
                csv += "," + num(node >= 0 ? traj.fields[k].coeffs[node * space.m + c] : 0.0);
            csv += "\n";
        }
        write_text(fs::path(out_dir) / name, csv);
        ++written;
    }

    json manifest;
    manifest["grid"] = {{"d", cfg.problem.d},   {"m", cfg.problem.m}, {"n_space", n_space},
                        {"n_time", n_time},     {"h", space.mesh.h},  {"tau", traj.tau},
                        {"T", cfg.problem.T}};
    manifest["initial_stable"] = traj.initial_stable;
    manifest["initial_margin"] = traj.initial_margin;
    manifest["timings"] = {{"solve_s", solve_s}};
    json certs = json::array();
    for (const auto& c : traj.certificates)
        certs.push_back({{"iterations", c.iterations},
                         {"residual", c.residual},
                         {"el_violation", c.el_violation},
                         {"objective_decreased", c.objective_decreased}});
    manifest["certificates"] = std::move(certs);
    std::ofstream mf(fs::path(out_dir) / "manifest.json");
    mf << manifest.dump(2) << "\n";
    std::cout << "wrote " << written << " checkpoints and manifest.json to " << out_dir << "\n";
    return 0;
}

std::string report_csv(const risolve::EstimateReport& rep) {
    std::string csv = "level,h,tau,measured,bound_or_trend,pass\n";
    for (const auto& r : rep.rows)
        csv += std::to_string(r.level) + "," + num(r.h) + "," + num(r.tau) + "," +
               num(r.measured) + "," + num(r.bound_or_trend) + "," + (r.pass ? "1" : "0") + "\n";
    return csv;
}

int cmd_verify(const risolve::RunConfig& cfg, const std::string& suite,
               const std::string& out_dir) {
    using namespace risolve;
    fs::create_directories(out_dir);
    std::vector<FamilyLevel> levels = cfg.verify_levels;
    if (levels.empty())
        levels = (cfg.problem.d == 1) ? std::vector<FamilyLevel>{{16, 250}, {32, 500}, {64, 1000}}
                                      : std::vector<FamilyLevel>{{8, 32}, {16, 64}, {32, 128}};
    RunOptions opts;
    opts.step = cfg.step;

    bool all_pass = true;
    auto emit = [&](const EstimateReport& rep) {
        write_text(fs::path(out_dir) / (rep.suite + ".csv"), report_csv(rep));
        std::cout << rep.suite << ": " << (rep.pass ? "PASS" : "FAIL") << "\n";
        all_pass = all_pass && rep.pass;
    };

    const bool all = suite == "all";
    if (all || suite == "coercivity") emit(verify_coercivity(cfg.problem, levels, opts));
    if (all || suite == "time") emit(verify_time_bound(cfg.problem, levels, opts));
    if (all || suite == "sobolev") {
        std::vector<int> ns;
        for (const auto& l : levels) ns.push_back(l.n);
        emit(verify_sobolev(cfg.problem.d, ns, 200, cfg.seed));
    }
    if (all || suite == "holder") emit(verify_holder(cfg.problem, levels, 0.25, 10000, opts));
    if (all || suite == "uniqueness") emit(verify_uniqueness(cfg.problem, levels, 1e-3, opts));
    return all_pass ? 0 : 1;
}

int cmd_sweep(const risolve::RunConfig& cfg, const std::string& out_dir) {
    using namespace risolve;
    fs::create_directories(out_dir);
    const json sw = cfg.raw.contains("sweep") ? cfg.raw.at("sweep") : json::object();
    RunOptions opts;
    opts.step = cfg.step;

    auto emit = [&](const SweepResult& res, const std::string& name) {
        std::string csv = "level,h,tau,sq_error,slope,pass\n";
        std::string plot;
        for (const auto& r : res.rows) {
            csv += std::to_string(r.level) + "," + num(r.h) + "," + num(r.tau) + "," +
                   num(r.sq_error) + "," + num(res.fit.slope) + "," + (res.pass ? "1" : "0") + "\n";
            plot += num(name == "sweep_h" ? r.h : r.tau) + " " + num(r.sq_error) + "\n";
        }
        write_text(fs::path(out_dir) / (name + ".csv"), csv);
        write_text(fs::path(out_dir) / (name + ".dat"), plot);
        std::cout << name << ": slope " << res.fit.slope << " (theoretical >= 0.9*"
                  << res.theoretical_exponent << ") " << (res.pass ? "PASS" : "FAIL") << "\n";
        return res.pass;
    };

    bool all_pass = true;
    const std::string mode = sw.value("exact", "pde_reference");
    if (mode == "pde_reference") {
        const ExactSolution exact = pde_reference_exact();
        const std::vector<int> hs = sw.value("h_levels", std::vector<int>{16, 32, 64, 128});
        const int n_for_h = sw.value("n_time_for_h", 4000);
        const std::vector<int> taus = sw.value("tau_levels", std::vector<int>{125, 250, 500, 1000});
        const int n_for_tau = sw.value("n_space_for_tau", 256);
        all_pass &= emit(h_sweep(cfg.problem, exact, hs, n_for_h, opts), "sweep_h");
        all_pass &= emit(tau_sweep(cfg.problem, exact, n_for_tau, taus, opts), "sweep_tau");
    } else if (mode == "self_reference") {
        std::vector<FamilyLevel> coarse;
        for (const auto& lvl : sw.at("coarse")) coarse.push_back({lvl.at(0), lvl.at(1)});
        FamilyLevel ref{sw.at("reference").at(0), sw.at("reference").at(1)};
        all_pass &= emit(self_reference(cfg.problem, coarse, ref, opts), "sweep_h");
    } else {
        throw Error("sweep: unknown exact mode " + mode);
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rate-independent quasistatic evolution solver and verification harness"};
    app.require_subcommand(1);

    auto* zd = app.add_subcommand("zero-dim", "closed-form scalar model and its steppers");
    std::string zd_mode = "weak", zd_out = "zero_dim.csv";
    double zd_tau = 1e-3, zd_T = 2.0;
    zd->add_option("--mode", zd_mode, "weak|strong|extended|global|local");
    zd->add_option("--tau", zd_tau, "time step");
    zd->add_option("--T", zd_T, "horizon");
    zd->add_option("--out", zd_out, "output CSV path");

    auto* rn = app.add_subcommand("run", "single evolution run");
    std::string rn_config, rn_out = "out";
    int rn_n = 0, rn_N = 0;
    rn->add_option("--config", rn_config, "problem/config JSON")->required();
    rn->add_option("--n-space", rn_n, "spatial resolution override");
    rn->add_option("--n-time", rn_N, "time steps override");
    rn->add_option("--out", rn_out, "output directory");

    auto* vf = app.add_subcommand("verify", "a-priori estimate suites over a refinement family");
    std::string vf_config, vf_suite = "all", vf_out = "verify";
    vf->add_option("--config", vf_config, "problem/config JSON")->required();
    vf->add_option("--suite", vf_suite, "coercivity|time|sobolev|holder|uniqueness|all");
    vf->add_option("--out", vf_out, "output directory");

    auto* sp = app.add_subcommand("sweep", "convergence-rate sweeps and log-log fits");
    std::string sp_config, sp_out = "sweep";
    sp->add_option("--config", sp_config, "problem/config JSON")->required();
    sp->add_option("--out", sp_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (zd->parsed()) return cmd_zero_dim(zd_mode, zd_tau, zd_T, zd_out);
        if (rn->parsed()) {
            auto cfg = risolve::config_from_file(rn_config);
            return cmd_run(cfg, rn_n > 0 ? rn_n : cfg.n_space, rn_N > 0 ? rn_N : cfg.n_time,
                           rn_out);
        }
        if (vf->parsed()) return cmd_verify(risolve::config_from_file(vf_config), vf_suite, vf_out);
        if (sp->parsed()) return cmd_sweep(risolve::config_from_file(sp_config), sp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
