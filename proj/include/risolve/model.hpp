#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace risolve {

/// Convex, positively 1-homogeneous dissipation density R1 on R^m together
/// with its proximal map prox(x, lambda) = argmin_z lambda*R1(z) + |z-x|^2/2.
/// The increment solver composes the shift around the previous state itself.
struct DissipationPotential {
    std::function<double(std::span<const double>)> evaluate;
    std::function<void(std::span<const double>, double, std::span<double>)> prox;
    double lipschitz_bound = 1.0;   // global Lipschitz constant of R1
    double lower_bound_coeff = 0.0; // R1(z) >= c|z|
    std::string name = "custom";
};

/// Smooth energy density W0 with q-growth and semi-monotonicity modulus mu:
/// (DW0(v)-DW0(w))·(v-w) >= -mu|v-w|^2.
struct EnergyDensity {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    // optional row-major m x m Hessian, used for diagnostics and step sizing
    std::function<void(std::span<const double>, std::span<double>)> hessian;
    double growth_exponent_q = 2.0;
    double growth_constant_C = 2.0;
    double semimonotonicity_mu = 0.0;
    // sup of |D^2 W0|_2 over the box { |v|_inf <= r }; estimated by finite
    // differences when absent
    std::function<double(double)> curvature_bound;
    // third-derivative blow-up metadata |D^3 W0(v)| <= max{|v|^-sigma, M};
    // recorded only, never gates a solve
    double third_derivative_sigma = 0.0;
    double third_derivative_M = 0.0;
    std::string name = "custom";
};

/// Fourth-order coefficient tensor A(t,x) of the elliptic regularizer,
/// written row-major as a (m*d) x (m*d) matrix with index (alpha*d+i).
struct EllipticTensor {
    int d = 1;
    int m = 1;
    std::function<void(double, std::span<const double>, std::span<double>)> evaluate;
    double kappa = 1.0;     // modulus of ellipticity
    double lipschitz = 0.0; // space-time Lipschitz seminorm
    bool time_independent = true;
    std::string name = "custom";
};

struct ForceField {
    int d = 1;
    int m = 1;
    std::function<void(double, std::span<const double>, std::span<double>)> evaluate;
    std::function<void(double, std::span<const double>, std::span<double>)> time_derivative;
    double time_exponent_a = std::numeric_limits<double>::infinity();
    double space_exponent_p = 2.0;
    std::string name = "custom";
};

struct ProblemSpec {
    int d = 1;
    int m = 1;
    double T = 1.0;
    DissipationPotential dissipation;
    EnergyDensity energy;
    EllipticTensor tensor;
    ForceField force;
    std::function<void(std::span<const double>, std::span<double>)> initial;
    std::string initial_name = "zero";
    bool bypass_admissibility = false;
};

// built-ins

DissipationPotential builtin_abs_dissipation(double scale);
EnergyDensity builtin_double_well(double gamma);       // gamma(|v|^2-1)^2, q=4, mu=4*gamma
EnergyDensity builtin_quadratic(double scale = 1.0);   // scale*|v|^2/2, mu=0
EnergyDensity builtin_power(double q);                 // |v|^q, q>=2, mu=0
EllipticTensor identity_tensor(int d, int m, double kappa = 1.0);
// (a0 + at*t + ax*x_1) * identity; Lipschitz in space-time by construction
EllipticTensor isotropic_affine_tensor(int d, int m, double a0, double at, double ax);
ForceField zero_force(int d, int m);
ForceField linear_time_force(int d, int m, double coeff); // f = coeff*t per component
ForceField rough_power_force(int d, int m, double coeff, double exponent); // coeff*t^p*prod sin(pi x_i)
std::function<void(std::span<const double>, std::span<double>)> zero_initial(int m);
std::function<void(std::span<const double>, std::span<double>)> constant_initial(std::vector<double> value);

// admissibility

struct SampleOptions {
    double box_radius = 10.0; // |v|_inf bound of the sampling box
    int density_samples = 1000;
    int monotonicity_pairs = 10000;
    std::uint64_t seed = 20240817;
};

struct AdmissibilityCheck {
    std::string name;
    bool pass = true;
    double margin = 0.0;
    std::string detail;
};

struct AdmissibilityReport {
    std::vector<AdmissibilityCheck> checks;
    double mu_cp_margin = 0.0; // kappa - mu*C_P^2
    bool gate_ok = false;      // the hard gate: mu*C_P^2 < kappa
    bool all_pass = false;
};

/// Samples every standing assumption on the problem data and records the
/// measured margins. Throws NonFiniteEvaluation when a density returns
/// NaN/inf on the sample set. The hard failure is the mild-convexity gate.
AdmissibilityReport check_admissibility(const ProblemSpec& spec, double poincare_constant,
                                        const SampleOptions& opts = {});

} // namespace risolve
