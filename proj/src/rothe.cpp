#include "risolve/rothe.hpp"

#include "risolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace risolve {

NodalField Trajectory::interpolate(double t) const {
    NodalField out;
    out.time = t;
    const int n = steps();
    if (t <= times.front()) {
        out.coeffs = fields.front().coeffs;
        return out;
    }
    if (t >= times.back()) {
        out.coeffs = fields.back().coeffs;
        return out;
    }
    int k = std::min(static_cast<int>(std::ceil((t - times.front()) / tau)), n);
    if (k >= 1 && t <= times[k - 1]) --k; // snap to the grid value at grid times
    if (k < 1) k = 1;
    if (t >= times[k]) {
        out.coeffs = fields[k].coeffs;
        return out;
    }
    const double theta = (t - times[k - 1]) / tau;
    out.coeffs.resize(fields[k].coeffs.size());
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] = (1.0 - theta) * fields[k - 1].coeffs[i] + theta * fields[k].coeffs[i];
    return out;
}

NodalField Trajectory::difference_quotient(int k) const {
    NodalField out;
    out.time = times[k];
    out.coeffs.assign(fields[0].coeffs.size(), 0.0);
    if (k == 0) return out; // u_0 = u_{-1} convention
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] = (fields[k].coeffs[i] - fields[k - 1].coeffs[i]) / tau;
    return out;
}

double Trajectory::evaluate(double t, const double* x, int comp) const {
    const int n = steps();
    if (t <= times.front()) return evaluate_field(*space, fields.front(), x, comp);
    if (t >= times.back()) return evaluate_field(*space, fields.back(), x, comp);
    int k = std::min(static_cast<int>(std::ceil((t - times.front()) / tau)), n);
    if (k >= 1 && t <= times[k - 1]) --k;
    if (k < 1) k = 1;
    if (t >= times[k]) return evaluate_field(*space, fields[k], x, comp);
    const double theta = (t - times[k - 1]) / tau;
    return (1.0 - theta) * evaluate_field(*space, fields[k - 1], x, comp) +
           theta * evaluate_field(*space, fields[k], x, comp);
}

SpatialFunction initial_function(const ProblemSpec& spec) {
    SpatialFunction g;
    const int m = spec.m;
    auto initial = spec.initial;
    g.value = [initial, m](std::span<const double> x, int comp) {
        std::vector<double> u(m);
        initial(x, u);
        return u[comp];
    };
    g.gradient = [initial, m](std::span<const double> x, int comp, int dir) {
        const double step = 1e-6;
        std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
        xp[dir] += step;
        xm[dir] -= step;
        std::vector<double> up(m), um(m);
        initial(xp, up);
        initial(xm, um);
        return (up[comp] - um[comp]) / (2.0 * step);
    };
    return g;
}

namespace {

double h1_distance(const FemSpace& space, const Vector& a, const Vector& b) {
    NodalField diff;
    diff.coeffs.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff.coeffs[i] = a[i] - b[i];
    const double l2 = l2_norm(space, diff);
    const double h1 = h1_seminorm(space, diff);
    return std::sqrt(l2 * l2 + h1 * h1);
}

} // namespace

Trajectory run(const ProblemSpec& spec, const FemSpace& space, int n_steps,
               const RunOptions& opts) {
    if (n_steps < 1) throw Error("run: need at least one step");

    if (opts.check_admissibility_gate && !spec.bypass_admissibility) {
        const double mu = spec.energy.semimonotonicity_mu;
        const double kappa = spec.tensor.kappa;
        if (mu > 0.0) {
            const double cp = poincare_constant(space);
            if (mu * cp * cp >= kappa) {
                std::ostringstream os;
                os << "mild convexity violated: mu*C_P^2 = " << mu * cp * cp
                   << " >= kappa = " << kappa;
                throw AdmissibilityViolation(os.str());
            }
        } else if (!(kappa > 0.0)) {
            throw AdmissibilityViolation("ellipticity modulus must be positive");
        }
    }

    const double tau = spec.T / n_steps;
    Trajectory traj;
    traj.space = std::make_shared<FemSpace>(space);
    traj.tau = tau;
    traj.times.resize(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) traj.times[k] = k * tau;

    // stiffness cache; time-independent tensors assemble once
    SparseSymmetric k_matrix = assemble_stiffness(space, spec.tensor, 0.0);
    double lambda_max = largest_eigenvalue(k_matrix);
    const Vector weights = lumped_mass(space);

    NodalField u0 = elliptic_project_initial(space, initial_function(spec), spec.tensor);
    traj.fields.resize(n_steps + 1);
    traj.fields[0] = u0;

    IncrementData data;
    data.stiffness = &k_matrix;
    data.lumped_weights = &weights;
    data.dissipation = &spec.dissipation;
    data.energy = &spec.energy;
    data.m = space.m;

    // k = 0 solve verifies discrete stability of the initial datum; the
    // trajectory keeps the projected datum either way
    Vector load = assemble_load(space, spec.force, 0.0);
    data.load = &load;
    data.stiffness_lambda_max = lambda_max;
    StepResult probe = minimize_increment_data(data, u0.coeffs, opts.step);
    traj.initial_margin = h1_distance(space, probe.minimizer, u0.coeffs);
    const double u0_scale = 1.0 + h1_distance(space, u0.coeffs, Vector(u0.coeffs.size(), 0.0));
    traj.initial_stable =
        traj.initial_margin <= opts.stability_tol_factor * opts.step.tolerance * u0_scale;
    traj.certificates.resize(n_steps + 1);
    traj.certificates[0] = probe.certificate;

    for (int k = 1; k <= n_steps; ++k) {
        const double t_k = traj.times[k];
        if (!spec.tensor.time_independent) {
            k_matrix = assemble_stiffness(space, spec.tensor, t_k);
            lambda_max = largest_eigenvalue(k_matrix);
            data.stiffness_lambda_max = lambda_max;
        }
        load = assemble_load(space, spec.force, t_k);
        StepResult step = minimize_increment_data(data, traj.fields[k - 1].coeffs, opts.step);
        if (!step.certificate.objective_decreased)
            throw Error("run: per-step objective decrease violated at step " + std::to_string(k));
        traj.fields[k].coeffs = std::move(step.minimizer);
        traj.fields[k].time = t_k;
        traj.certificates[k] = step.certificate;
    }
    return traj;
}

StabilityProbe check_initial_stability(const ProblemSpec& spec, const FemSpace& space,
                                       const StepOptions& opts) {
    NodalField u0 = elliptic_project_initial(space, initial_function(spec), spec.tensor);
    SparseSymmetric k_matrix = assemble_stiffness(space, spec.tensor, 0.0);
    const Vector weights = lumped_mass(space);
    const Vector load = assemble_load(space, spec.force, 0.0);
    IncrementData data;
    data.stiffness = &k_matrix;
    data.lumped_weights = &weights;
    data.load = &load;
    data.dissipation = &spec.dissipation;
    data.energy = &spec.energy;
    data.m = space.m;
    StepResult probe = minimize_increment_data(data, u0.coeffs, opts);
    StabilityProbe out;
    out.margin = h1_distance(space, probe.minimizer, u0.coeffs);
    const double scale = 1.0 + h1_distance(space, u0.coeffs, Vector(u0.coeffs.size(), 0.0));
    out.stable = out.margin <= 100.0 * opts.tolerance * scale;
    return out;
}

} // namespace risolve
