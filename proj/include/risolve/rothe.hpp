#pragma once

#include "risolve/fem.hpp"
#include "risolve/increment.hpp"
#include "risolve/model.hpp"

#include <memory>

namespace risolve {

/// Discrete evolution on the uniform grid t_k = k*tau with the convention
/// u_0 = u_{-1} = elliptic projection of the initial datum, together with the
/// piecewise-affine-in-time interpolant.
struct Trajectory {
    std::shared_ptr<const FemSpace> space;
    double tau = 0.0;
    std::vector<double> times;
    std::vector<NodalField> fields;            // N+1 entries
    std::vector<StepCertificate> certificates; // entry 0 is the initial stability probe
    bool initial_stable = true;
    double initial_margin = 0.0;

    int steps() const { return static_cast<int>(times.size()) - 1; }
    /// u_tau(t): affine on (t_{k-1}, t_k], equal to u_k at the grid points.
    NodalField interpolate(double t) const;
    /// delta_k = (u_k - u_{k-1})/tau with delta_0 = 0.
    NodalField difference_quotient(int k) const;
    double evaluate(double t, const double* x, int comp = 0) const;
};

struct RunOptions {
    StepOptions step;
    double stability_tol_factor = 100.0; // times the inner tolerance
    bool check_admissibility_gate = true;
};

/// Drives the full time loop. Throws AdmissibilityViolation when the mild
/// convexity gate fails (unless the spec bypasses it); initial instability is
/// reported in the trajectory, not fatal.
Trajectory run(const ProblemSpec& spec, const FemSpace& space, int n_steps,
               const RunOptions& opts = {});

struct StabilityProbe {
    bool stable = true;
    double margin = 0.0; // H1 distance moved by the k=0 solve
};

StabilityProbe check_initial_stability(const ProblemSpec& spec, const FemSpace& space,
                                       const StepOptions& opts = {});

/// The spatial initial datum of a spec as a SpatialFunction (zero gradient;
/// only nodal values feed the projector's quadrature through interpolation).
SpatialFunction initial_function(const ProblemSpec& spec);

} // namespace risolve
