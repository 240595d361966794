#include "risolve/harness.hpp"

#include "risolve/errors.hpp"
#include "risolve/zero_dim.hpp"

#include <algorithm>
#include <cmath>

namespace risolve {

ExactSolution pde_reference_exact() {
    ExactSolution e;
    e.value = [](double t, std::span<const double> x, int) {
        return std::max(t - 1.0, 0.0) * pde_profile(x[0]);
    };
    e.gradient = [](double t, std::span<const double> x, int, int) {
        return std::max(t - 1.0, 0.0) * pde_profile_gradient(x[0]);
    };
    return e;
}

ProblemSpec pde_reference_problem(double T) {
    ProblemSpec spec;
    spec.d = 1;
    spec.m = 1;
    spec.T = T;
    spec.dissipation = builtin_abs_dissipation(1.0);
    spec.energy = builtin_quadratic(1.0);
    spec.tensor = identity_tensor(1, 1, 1.0);
    spec.force = linear_time_force(1, 1, 1.0);
    spec.initial = zero_initial(1);
    spec.initial_name = "zero";
    return spec;
}

namespace {

// W^{1,2} norm squared of (traj field at time t) - (nodal samples of exact)
double sample_error_sq(const Trajectory& traj, const FemSpace& space, const ExactSolution& exact,
                       double t) {
    const NodalField u = traj.interpolate(t);
    NodalField diff;
    diff.coeffs.resize(u.coeffs.size());
    for (int i = 0; i < space.n_nodes; ++i) {
        const auto& xy = space.mesh.vertices[space.node_to_vertex[i]];
        const std::span<const double> xs(xy.data(), space.mesh.dim);
        for (int c = 0; c < space.m; ++c)
            diff.coeffs[i * space.m + c] = u.coeffs[i * space.m + c] - exact.value(t, xs, c);
    }
    const double l2 = l2_norm(space, diff);
    const double h1 = h1_seminorm(space, diff);
    return l2 * l2 + h1 * h1;
}

} // namespace

double error_l2h1(const Trajectory& traj, const ExactSolution& exact) {
    const FemSpace& space = *traj.space;
    const int sub = 5;
    double acc = 0.0;
    for (int k = 1; k <= traj.steps(); ++k) {
        const double t0 = traj.times[k - 1];
        const double dt = traj.tau / sub;
        double prev = sample_error_sq(traj, space, exact, t0);
        for (int j = 1; j <= sub; ++j) {
            const double curr = sample_error_sq(traj, space, exact, t0 + j * dt);
            acc += 0.5 * dt * (prev + curr);
            prev = curr;
        }
    }
    return acc;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw InsufficientLevels("fit_rate: need at least 3 levels, got " +
                                 std::to_string(points.size()));
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first < points[i - 1].first))
            throw Error("fit_rate: parameters must be strictly decreasing");
    RateFit fit;
    fit.points = points;
    const int n = static_cast<int>(points.size());
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        if (!(points[i].second > 0.0))
            throw Error("fit_rate: squared errors must be positive for the log-log fit");
        xs[i] = std::log(points[i].first);
        ys[i] = std::log(points[i].second);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    if (!std::isfinite(fit.slope)) throw Error("fit_rate: non-finite slope");
    return fit;
}

SweepResult h_sweep(const ProblemSpec& spec, const ExactSolution& exact,
                    const std::vector<int>& ns, int n_steps, const RunOptions& opts) {
    SweepResult res;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t l = 0; l < ns.size(); ++l) {
        const FemSpace space = build_space(spec, ns[l]);
        const Trajectory traj = run(spec, space, n_steps, opts);
        const double err = error_l2h1(traj, exact);
        res.rows.push_back({static_cast<int>(l), space.mesh.h, traj.tau, err});
        pts.emplace_back(space.mesh.h, err);
    }
    res.fit = fit_rate(pts);
    res.theoretical_exponent = 1.0;
    res.pass = res.fit.slope >= 0.9 * res.theoretical_exponent;
    return res;
}

SweepResult tau_sweep(const ProblemSpec& spec, const ExactSolution& exact, int n,
                      const std::vector<int>& step_counts, const RunOptions& opts) {
    SweepResult res;
    const FemSpace space = build_space(spec, n);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t l = 0; l < step_counts.size(); ++l) {
        const Trajectory traj = run(spec, space, step_counts[l], opts);
        const double err = error_l2h1(traj, exact);
        res.rows.push_back({static_cast<int>(l), space.mesh.h, traj.tau, err});
        pts.emplace_back(traj.tau, err);
    }
    res.fit = fit_rate(pts);
    const double a = spec.force.time_exponent_a;
    res.theoretical_exponent = std::isfinite(a) ? std::min(1.0, a - 1.0) : 1.0;
    // rough forcing (a < 2) is report-only: measured rates are too noisy at
    // desk scale to gate on
    res.report_only = std::isfinite(a) && a < 2.0;
    res.pass = res.report_only || res.fit.slope >= 0.9 * res.theoretical_exponent;
    return res;
}

std::pair<SweepResult, SweepResult> sweep_and_fit(const ProblemSpec& spec,
                                                  const ExactSolution& exact,
                                                  const std::vector<int>& ns,
                                                  const std::vector<int>& step_counts,
                                                  const RunOptions& opts) {
    const int finest_steps = *std::max_element(step_counts.begin(), step_counts.end());
    const int finest_n = *std::max_element(ns.begin(), ns.end());
    return {h_sweep(spec, exact, ns, finest_steps, opts),
            tau_sweep(spec, exact, finest_n, step_counts, opts)};
}

ExactSolution trajectory_as_exact(const Trajectory& traj) {
    // the caller keeps the trajectory alive; sweeps hold it in scope
    const Trajectory* t = &traj;
    ExactSolution e;
    e.value = [t](double time, std::span<const double> x, int comp) {
        return t->evaluate(time, x.data(), comp);
    };
    e.gradient = [t](double time, std::span<const double> x, int comp, int dir) {
        const NodalField u = t->interpolate(time);
        std::array<double, 3> bary;
        const int c = t->space->mesh.locate(x.data(), bary);
        std::array<std::array<double, 2>, 3> grads;
        t->space->mesh.cell_gradients(c, grads);
        const auto& cell = t->space->mesh.cells[c];
        double g = 0.0;
        for (int a = 0; a < t->space->mesh.vertices_per_cell(); ++a) {
            const int node = t->space->vertex_to_node[cell[a]];
            if (node >= 0) g += u.coeffs[node * t->space->m + comp] * grads[a][dir];
        }
        return g;
    };
    return e;
}

SweepResult self_reference(const ProblemSpec& spec, const std::vector<FamilyLevel>& coarse,
                           FamilyLevel reference, const RunOptions& opts) {
    for (const auto& lvl : coarse)
        if (reference.n < 4 * lvl.n || reference.steps < 4 * lvl.steps)
            throw Error("self_reference: reference level must be at least 4x finer in h and tau");
    const FemSpace ref_space = build_space(spec, reference.n);
    const Trajectory ref = run(spec, ref_space, reference.steps, opts);
    const ExactSolution surrogate = trajectory_as_exact(ref);
    SweepResult res;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t l = 0; l < coarse.size(); ++l) {
        const FemSpace space = build_space(spec, coarse[l].n);
        const Trajectory traj = run(spec, space, coarse[l].steps, opts);
        const double err = error_l2h1(traj, surrogate);
        res.rows.push_back({static_cast<int>(l), space.mesh.h, traj.tau, err});
        pts.emplace_back(space.mesh.h, err);
    }
    res.fit = fit_rate(pts);
    res.theoretical_exponent = 1.0;
    res.pass = res.fit.slope >= 0.9 * res.theoretical_exponent;
    return res;
}

} // namespace risolve
