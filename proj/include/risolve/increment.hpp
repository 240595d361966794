#pragma once

#include "risolve/fem.hpp"
#include "risolve/linalg.hpp"
#include "risolve/model.hpp"

namespace risolve {

struct StepOptions {
    double tolerance = 1e-10;   // absolute fixed-point tolerance, scaled by field magnitude
    int max_iterations = 100000;
    double safety_factor = 0.9; // step = safety/L
    bool acceleration = true;   // momentum with restart on objective increase
};

struct StepCertificate {
    int iterations = 0;
    double residual = 0.0;     // final fixed-point residual (scaled)
    double el_violation = 0.0; // worst normalized Euler-Lagrange violation
    bool objective_decreased = true;
    double objective = 0.0;
    double objective_prev = 0.0; // value at u_prev, for the decrease check
};

/// One implicit step in coefficient form: minimize
///   F(v) = sum_i w_i R1(v_i - p_i) + v·K v/2 + sum_i w_i W0(v_i) - b·v
/// over node blocks v_i in R^m. Lumping makes the nonsmooth term separable,
/// so the prox decouples nodewise.
struct IncrementData {
    const SparseSymmetric* stiffness = nullptr; // null means K = 0
    const Vector* lumped_weights = nullptr;     // per node, length n_nodes
    const Vector* load = nullptr;               // length n_nodes*m
    const DissipationPotential* dissipation = nullptr;
    const EnergyDensity* energy = nullptr;
    int m = 1;
    double stiffness_lambda_max = -1.0; // estimated when negative
};

struct StepResult {
    Vector minimizer;
    StepCertificate certificate;
};

double increment_objective(const IncrementData& data, const Vector& v, const Vector& u_prev);

StepResult minimize_increment_data(const IncrementData& data, const Vector& u_prev,
                                   const StepOptions& opts, const Vector* warm_start = nullptr);

/// Worst positive part of the discrete variational inequality over the
/// canonical test set {0, 2*delta, delta +- eps*e_i}, normalized by the data
/// scale; basis probes are reported per unit of probe length.
double el_residual_data(const IncrementData& data, const Vector& u_k, const Vector& u_prev);

/// Convenience wrappers that assemble the step data from the problem spec.
StepResult minimize_increment(const FemSpace& space, const NodalField& u_prev, double t_k,
                              const ProblemSpec& spec, const StepOptions& opts = {});
double el_residual(const FemSpace& space, const NodalField& u_k, const NodalField& u_prev,
                   double t_k, const ProblemSpec& spec);

} // namespace risolve
