#include "risolve/zero_dim.hpp"

#include "risolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risolve {

namespace {

constexpr double kTieTol = 1e-12;

// increment objective on one convex branch: |z-p| + z^2 + branch*2z - t*z,
// where branch = +1 gives W0 = z(z+2) (valid z<=0) and branch = -1 gives
// W0 = z(z-2) (valid z>=0)
double branch_objective(double z, double p, double t, int branch) {
    return std::abs(z - p) + z * z + 2.0 * branch * z - t * z;
}

struct BranchMin {
    double z = 0.0;
    double objective = std::numeric_limits<double>::infinity();
    bool clamped_to_zero = false; // interior candidate fell outside the branch
};

// minimize the branch objective over its validity half-line; the objective is
// convex piecewise-quadratic, so the minimum is one of the two per-piece
// stationary points, the kink z=p, or the boundary z=0
BranchMin minimize_branch(double p, double t, int branch) {
    const double lo = (branch < 0) ? 0.0 : -std::numeric_limits<double>::infinity();
    const double hi = (branch < 0) ? std::numeric_limits<double>::infinity() : 0.0;
    const double stat_up = (t - 2.0 * branch - 1.0) / 2.0;   // piece z > p
    const double stat_down = (t - 2.0 * branch + 1.0) / 2.0; // piece z < p
    double candidates[4] = {stat_up, stat_down, p, 0.0};
    BranchMin best;
    bool interior_outside = false;
    for (double c : candidates) {
        const double z = std::clamp(c, lo, hi);
        if (z != c && (c == stat_up || c == stat_down)) interior_outside = true;
        const double obj = branch_objective(z, p, t, branch);
        if (obj < best.objective) {
            best.objective = obj;
            best.z = z;
        }
    }
    best.clamped_to_zero = interior_outside && best.z == 0.0;
    return best;
}

} // namespace

double dw_value(double z) { return z * z - 2.0 * std::abs(z); }

double dw_gradient(double z) {
    const double sign = (z > 0.0) ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
    return 2.0 * z - 2.0 * sign;
}

double exact_solution(ScalarMode mode, double t) {
    switch (mode) {
    case ScalarMode::weak:
        return (t < 1.0) ? -1.0 : 0.5 * (t + 1.0);
    case ScalarMode::strong:
        if (t >= 3.0) throw OutOfDomain("strong solution exists on [0,3) only");
        return (t < 1.0) ? -1.0 : 0.5 * (t - 3.0);
    case ScalarMode::extended:
        if (t < 1.0) return -1.0;
        if (t < 3.0) return 0.5 * (t - 3.0);
        return 0.5 * (t + 1.0);
    }
    return 0.0;
}

double step_global(double u_prev, double t_k, double tau) {
    if (!(tau > 0.0)) throw Error("step_global: tau must be > 0");
    const BranchMin neg = minimize_branch(u_prev, t_k, +1); // z <= 0 branch, W0 = z(z+2)
    const BranchMin pos = minimize_branch(u_prev, t_k, -1); // z >= 0 branch, W0 = z(z-2)
    const double scale = 1.0 + std::abs(neg.objective) + std::abs(pos.objective);
    if (std::abs(neg.objective - pos.objective) <= kTieTol * scale) {
        return (std::abs(neg.z - u_prev) <= std::abs(pos.z - u_prev)) ? neg.z : pos.z;
    }
    return (neg.objective < pos.objective) ? neg.z : pos.z;
}

LocalStepResult step_local(double u_prev, double t_k, double tau, int prev_branch) {
    if (!(tau > 0.0)) throw Error("step_local: tau must be > 0");
    // prev_branch is the well sign (+1 positive well, -1 negative well), used
    // only at the convexity boundary u_prev = 0
    const int well = (u_prev < 0.0) ? -1 : (u_prev > 0.0 ? +1 : (prev_branch > 0 ? +1 : -1));
    const BranchMin res = minimize_branch(u_prev, t_k, well < 0 ? +1 : -1);
    return {res.z, res.clamped_to_zero};
}

ScalarTrajectory sample_exact(ScalarMode mode, double tau, double T) {
    ScalarTrajectory traj;
    traj.tag = (mode == ScalarMode::weak) ? "weak" : (mode == ScalarMode::strong ? "strong" : "extended");
    const int n = static_cast<int>(std::round(T / tau));
    traj.times.reserve(n + 1);
    traj.values.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = k * tau;
        traj.times.push_back(t);
        traj.values.push_back(exact_solution(mode, t));
    }
    return traj;
}

ScalarTrajectory run_scalar_global(double tau, double T, double u0) {
    ScalarTrajectory traj;
    traj.tag = "global";
    const int n = static_cast<int>(std::round(T / tau));
    traj.times.push_back(0.0);
    traj.values.push_back(u0);
    double u = u0;
    for (int k = 1; k <= n; ++k) {
        const double t = k * tau;
        u = step_global(u, t, tau);
        traj.times.push_back(t);
        traj.values.push_back(u);
    }
    return traj;
}

ScalarTrajectory run_scalar_local(double tau, double T, double u0) {
    ScalarTrajectory traj;
    traj.tag = "local";
    const int n = static_cast<int>(std::round(T / tau));
    traj.times.push_back(0.0);
    traj.values.push_back(u0);
    double u = u0;
    int well = (u0 > 0.0) ? +1 : -1;
    for (int k = 1; k <= n; ++k) {
        const double t = k * tau;
        const LocalStepResult r = step_local(u, t, tau, well);
        if (r.branch_exit) {
            traj.branch_exited = true;
            traj.exit_time = t;
            break;
        }
        u = r.value;
        if (u != 0.0) well = (u < 0.0) ? -1 : +1;
        traj.times.push_back(t);
        traj.values.push_back(u);
    }
    return traj;
}

std::vector<double> energy_balance_defects(const ScalarTrajectory& traj) {
    const auto& t = traj.times;
    const auto& u = traj.values;
    if (t.size() != u.size()) throw Error("trajectory: times and values disagree in length");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!std::isfinite(u[k]) || !std::isfinite(t[k]))
            throw Error("trajectory: non-finite entry");
        if (k > 0 && !(t[k] > t[k - 1])) throw Error("trajectory: time grid must increase");
    }
    std::vector<double> defects(t.size(), 0.0);
    if (t.size() < 2) return defects;
    auto energy = [](double time, double z) { return dw_value(z) - time * z; };
    const double e0 = energy(t[0], u[0]);
    double work = 0.0; // int f' u with f' = 1, composite trapezoid
    double var = 0.0;  // R1-variation including discrete jumps
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double dt = t[k] - t[k - 1];
        work += 0.5 * dt * (u[k] + u[k - 1]);
        var += std::abs(u[k] - u[k - 1]);
        defects[k] = energy(t[k], u[k]) - e0 + work + var;
    }
    return defects;
}

double energy_balance_residual(const ScalarTrajectory& traj) {
    double worst = 0.0;
    for (double d : energy_balance_defects(traj)) worst = std::max(worst, std::abs(d));
    return worst;
}

bool stability_check(double t, double u, StabilityKind kind) {
    if (kind == StabilityKind::local) {
        return std::abs(t - dw_gradient(u)) <= 1.0 + 1e-12;
    }
    // global: E(t,u) <= min_z E(t,z) + |z-u|, minimized per branch in closed form
    const double lhs = dw_value(u) - t * u;
    const BranchMin neg = minimize_branch(u, t, +1);
    const BranchMin pos = minimize_branch(u, t, -1);
    const double rhs = std::min(neg.objective, pos.objective);
    return lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs));
}

double pde_profile(double x) { return 1.0 - std::cosh(x - 0.5) / std::cosh(0.5); }

double pde_profile_gradient(double x) { return -std::sinh(x - 0.5) / std::cosh(0.5); }

PdeReferencePoint scalar_pde_reference(double x, double t) {
    if (x < 0.0 || x > 1.0) throw OutOfDomain("scalar_pde_reference: x must lie in [0,1]");
    const double ramp = std::max(t - 1.0, 0.0);
    return {ramp * pde_profile(x), ramp * pde_profile_gradient(x)};
}

} // namespace risolve
