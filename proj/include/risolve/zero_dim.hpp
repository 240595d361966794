#pragma once

#include <string>
#include <vector>

namespace risolve {

/// Zero-dimensional double-well model: W0(z) = min{z(z+2), z(z-2)} = z^2-2|z|,
/// R1(z) = |z|, f(t) = t, u(0) = -1. Closed-form solutions distinguish the
/// energetic (weak) evolution from the strong one.
enum class ScalarMode { weak, strong, extended };

enum class StabilityKind { global, local };

double dw_value(double z);    // z^2 - 2|z|
double dw_gradient(double z); // 2z - 2 sign(z), sign(0) = 0

/// Closed forms: weak jumps at t=1, strong tracks the left well until t=3.
/// Throws OutOfDomain for mode=strong, t >= 3.
double exact_solution(ScalarMode mode, double t);

/// One incremental step by global minimization of
/// z -> |z - u_prev| + W0(z) - t_k z, ties broken toward u_prev.
double step_global(double u_prev, double t_k, double tau);

struct LocalStepResult {
    double value = 0.0;
    bool branch_exit = false; // restricted minimizer reached the convexity boundary z=0
};

/// Same increment restricted to the convex branch containing u_prev; at
/// u_prev=0 the branch of the previous step (prev_branch, -1 or +1) is kept.
LocalStepResult step_local(double u_prev, double t_k, double tau, int prev_branch = -1);

struct ScalarTrajectory {
    std::vector<double> times;
    std::vector<double> values;
    std::string tag;
    bool branch_exited = false;
    double exit_time = 0.0;
};

ScalarTrajectory sample_exact(ScalarMode mode, double tau, double T);
ScalarTrajectory run_scalar_global(double tau, double T, double u0 = -1.0);
ScalarTrajectory run_scalar_local(double tau, double T, double u0 = -1.0);

/// Sup over grid times of the defect in the energy balance
/// E(t,u(t)) - E(0,u(0)) = -int_0^t f'(s) u(s) ds - Var_{R1}(u;[0,t]),
/// with jump dissipation counted as R1 of the discrete jumps.
double energy_balance_residual(const ScalarTrajectory& traj);
/// The per-grid-time defect series behind the residual.
std::vector<double> energy_balance_defects(const ScalarTrajectory& traj);

bool stability_check(double t, double u, StabilityKind kind);

struct PdeReferencePoint {
    double value = 0.0;
    double gradient = 0.0;
};

/// The scalar-PDE optimality example on (0,1): u(t,x) = max{t-1,0} phi(x)
/// with -phi'' + phi = 1, phi(0)=phi(1)=0.
PdeReferencePoint scalar_pde_reference(double x, double t);
double pde_profile(double x);            // phi
double pde_profile_gradient(double x);   // phi'

} // namespace risolve
