#pragma once

#include "risolve/rothe.hpp"

#include <cstdint>
#include <functional>

namespace risolve {

struct EstimateRow {
    int level = 0;
    double h = 0.0;
    double tau = 0.0;
    double measured = 0.0;
    double bound_or_trend = 0.0;
    bool pass = true;
};

struct EstimateReport {
    std::string suite;
    std::vector<EstimateRow> rows;
    bool pass = true;
};

/// Per-step coercivity ratios (||u_k||_q^q + ||grad u_k||^2) / (1 + ||f_k||^2).
std::vector<double> coercivity_ratios(const Trajectory& traj, const ProblemSpec& spec);

struct TimeBoundResult {
    double max_grad_dq = 0.0;   // max_k || grad delta_k ||_L2
    double bound_bracket = 0.0; // the a-priori coefficient times the data bracket
};

/// Discrete surrogate for the space regularity estimate: P1 fields carry no
/// second derivatives, so the measured quantity is max_k ||L_t u_k||_{L^2}
/// against the force scale, reported with both inhomogeneity exponents
/// max{1,(q-1)/2} and q-1.
struct SpaceEstimateResult {
    double max_laplace_norm = 0.0; // max over sampled steps of ||L_t u_k||_{L^2}
    double ratio_half = 0.0;       // vs 1 + ||f||^{max{1,(q-1)/2}}
    double ratio_full = 0.0;       // vs 1 + ||f||^{q-1}
};

SpaceEstimateResult space_estimate_ratios(const Trajectory& traj, const ProblemSpec& spec,
                                          int sampled_steps = 50);

/// Measured time-derivative bound against the a-priori coefficient
/// C/(kappa - mu C_P^2) * [1 + avg ||f'|| + ||f||].
TimeBoundResult time_derivative_bound(const Trajectory& traj, const ProblemSpec& spec,
                                      double poincare);

/// Maximized ratio ||grad z||_{L^p} / ||L_t z||_{L^2} over random unit fields
/// plus a few projected-ascent polish sweeps; the smallest-stiffness
/// eigenvector seeds the search.
double discrete_sobolev_ratio(const FemSpace& space, const EllipticTensor& tensor, double t,
                              int trials, int p = 6, std::uint64_t seed = 2718281828,
                              int ascent_iterations = 40);

/// Space-time Holder seminorm of the trajectory interpolant, sampled over a
/// deterministic low-discrepancy set of point pairs.
double holder_seminorm(const Trajectory& traj, double gamma, int samples);
/// Same metric for a scalar function of time alone.
double holder_seminorm_scalar(const std::function<double(double)>& fn, double T, double gamma,
                              int samples);

/// Runs the evolution twice with noise-perturbed inner warm starts and
/// returns the largest H1 distance between the two trajectories.
double uniqueness_probe(const ProblemSpec& spec, const FemSpace& space, int n_steps,
                        double perturbation, std::uint64_t seed = 97531,
                        const RunOptions& opts = {});

// refinement-family verifiers backing the `verify` CLI suites

struct FamilyLevel {
    int n = 0;      // spatial resolution
    int steps = 0;  // time steps
};

EstimateReport verify_coercivity(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                                 const RunOptions& opts = {});
EstimateReport verify_time_bound(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                                 const RunOptions& opts = {});
EstimateReport verify_sobolev(int dim, const std::vector<int>& ns, int trials,
                              std::uint64_t seed = 2718281828);
EstimateReport verify_holder(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                             double gamma, int samples, const RunOptions& opts = {});
EstimateReport verify_uniqueness(const ProblemSpec& spec, const std::vector<FamilyLevel>& levels,
                                 double perturbation, const RunOptions& opts = {});

FemSpace build_space(const ProblemSpec& spec, int n);

} // namespace risolve
