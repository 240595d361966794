#pragma once

#include "risolve/estimates.hpp"
#include "risolve/rothe.hpp"

namespace risolve {

/// Space-time exact solution with spatial gradient, sampled at mesh nodes
/// during error measurement.
struct ExactSolution {
    std::function<double(double t, std::span<const double> x, int comp)> value;
    std::function<double(double t, std::span<const double> x, int comp, int dir)> gradient;
};

/// The 1-d manufactured solution max{t-1,0}*phi(x).
ExactSolution pde_reference_exact();
/// Problem data whose strong solution is pde_reference_exact() on [0,T].
ProblemSpec pde_reference_problem(double T = 2.0);

/// Squared error int_0^T ||u_tau(t) - u(t)||_{W^{1,2}}^2 dt. The exact field
/// is sampled at the mesh nodes, the difference of the two P1 fields is
/// integrated exactly, and time uses a composite trapezoid with five
/// sub-samples per step.
double error_l2h1(const Trajectory& traj, const ExactSolution& exact);

struct RateFit {
    std::vector<std::pair<double, double>> points; // (parameter, squared error), decreasing parameter
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares slope of log(err^2) against log(parameter). Needs >= 3
/// points with strictly decreasing parameters.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct SweepRow {
    int level = 0;
    double h = 0.0;
    double tau = 0.0;
    double sq_error = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    RateFit fit;
    double theoretical_exponent = 1.0;
    bool report_only = false; // rough forcing: rates reported, not gated
    bool pass = false;        // slope >= 0.9 * theoretical (unless report-only)
};

SweepResult h_sweep(const ProblemSpec& spec, const ExactSolution& exact,
                    const std::vector<int>& ns, int n_steps, const RunOptions& opts = {});
SweepResult tau_sweep(const ProblemSpec& spec, const ExactSolution& exact, int n,
                      const std::vector<int>& step_counts, const RunOptions& opts = {});
/// Convenience pairing: h-sweep at the finest step count, tau-sweep on the
/// finest mesh.
std::pair<SweepResult, SweepResult> sweep_and_fit(const ProblemSpec& spec,
                                                  const ExactSolution& exact,
                                                  const std::vector<int>& ns,
                                                  const std::vector<int>& step_counts,
                                                  const RunOptions& opts = {});

/// Reference-trajectory surrogate for problems without closed forms; the
/// reference must be at least 4x finer in both h and tau.
SweepResult self_reference(const ProblemSpec& spec, const std::vector<FamilyLevel>& coarse,
                           FamilyLevel reference, const RunOptions& opts = {});

/// Exact-solution view of a computed trajectory (piecewise affine in time,
/// P1 in space).
ExactSolution trajectory_as_exact(const Trajectory& traj);

} // namespace risolve
