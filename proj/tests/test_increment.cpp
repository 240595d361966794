#include "risolve/increment.hpp"

#include "risolve/errors.hpp"
#include "risolve/harness.hpp"
#include "risolve/zero_dim.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace risolve;
using risolve::testing::field_as_function;
using risolve::testing::field_difference;
using risolve::testing::h1_norm;

namespace {

// single-node increment with K = 0 and unit weight
struct ScalarIncrement {
    Vector weights{1.0};
    Vector load;
    DissipationPotential r1 = builtin_abs_dissipation(1.0);
    EnergyDensity w0 = builtin_quadratic(1.0);
    IncrementData data;

    explicit ScalarIncrement(double force) : load{force} {
        data.stiffness = nullptr;
        data.lumped_weights = &weights;
        data.load = &load;
        data.dissipation = &r1;
        data.energy = &w0;
        data.m = 1;
    }
};

} // namespace

TEST_SUITE("increment") {

TEST_CASE("zero force keeps the origin in one iteration") {
    ScalarIncrement inc(0.0);
    const Vector u_prev{0.0};
    const StepResult r = minimize_increment_data(inc.data, u_prev, StepOptions{});
    CHECK(r.minimizer[0] == 0.0);
    CHECK(r.certificate.iterations == 1);
    CHECK(r.certificate.objective_decreased);
}

TEST_CASE("scalar reduction matches soft-threshold stationarity") {
    // |f - DW0(-1)| = 0.5 <= 1: the state is stable and the step returns it
    {
        ScalarIncrement inc(-0.5);
        const StepResult r = minimize_increment_data(inc.data, Vector{-1.0}, StepOptions{});
        CHECK(r.minimizer[0] == -1.0);
    }
    // f = 0.5 exceeds the threshold: stationarity 1 + z - f = 0 gives -0.5
    {
        ScalarIncrement inc(0.5);
        const StepResult r = minimize_increment_data(inc.data, Vector{-1.0}, StepOptions{});
        CHECK(r.minimizer[0] == doctest::Approx(-0.5).epsilon(1e-8));
        CHECK(r.certificate.objective_decreased);
    }
}

TEST_CASE("scalar reduction reproduces the branch-restricted stepper") {
    // W0 = (z+1)^2 equals the left-well energy z^2+2z up to a constant, so
    // the K=0 increment matches the closed-form local step
    ScalarIncrement inc(1.5); // load = t_k
    EnergyDensity shifted = builtin_quadratic(2.0);
    shifted.value = [](std::span<const double> v) { return (v[0] + 1.0) * (v[0] + 1.0); };
    shifted.gradient = [](std::span<const double> v, std::span<double> g) {
        g[0] = 2.0 * (v[0] + 1.0);
    };
    shifted.curvature_bound = [](double) { return 2.0; };
    inc.data.energy = &shifted;
    const StepResult r = minimize_increment_data(inc.data, Vector{-1.0}, StepOptions{});
    const double closed_form = step_local(-1.0, 1.5, 1e-3).value;
    CHECK(closed_form == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(r.minimizer[0] == doctest::Approx(closed_form).epsilon(1e-8));
}

TEST_CASE("double-well bottom is incrementally stable") {
    ScalarIncrement inc(0.0);
    EnergyDensity dw = builtin_double_well(0.1);
    inc.data.energy = &dw;
    const StepResult r = minimize_increment_data(inc.data, Vector{-1.0}, StepOptions{});
    CHECK(r.minimizer[0] == -1.0);
}

TEST_CASE("euler-lagrange certificate") {
    const ProblemSpec spec = pde_reference_problem();
    const FemSpace space = build_space(spec, 32);
    NodalField u_prev = interpolate(space, SpatialFunction{
        [](std::span<const double> x, int) { return 0.9 * pde_profile(x[0]); }, nullptr});
    const StepOptions opts;
    const StepResult r = minimize_increment(space, u_prev, 2.0, spec, opts);
    CHECK(r.certificate.el_violation <= 10.0 * opts.tolerance);
    CHECK(r.certificate.objective_decreased);

    // a large perturbation is detected
    NodalField bad{r.minimizer, 2.0};
    for (auto& v : bad.coeffs) v += 0.5;
    const double viol = el_residual(space, bad, u_prev, 2.0, spec);
    CHECK(viol > 100.0 * opts.tolerance);
}

TEST_CASE("one implicit step lands near the manufactured solution") {
    const ProblemSpec spec = pde_reference_problem();
    const FemSpace space = build_space(spec, 64);
    const double tau = 1e-3, t_k = 2.0;
    auto at_time = [](double t) {
        return SpatialFunction{
            [t](std::span<const double> x, int) { return scalar_pde_reference(x[0], t).value; },
            [t](std::span<const double> x, int, int) {
                return scalar_pde_reference(x[0], t).gradient;
            }};
    };
    const NodalField u_prev = interpolate(space, at_time(t_k - tau));
    const StepResult r = minimize_increment(space, u_prev, t_k, spec, StepOptions{});
    const NodalField target = interpolate(space, at_time(t_k));
    NodalField result{r.minimizer, t_k};
    CHECK(h1_norm(space, field_difference(result, target)) < 5e-3);
}

TEST_CASE("deterministic iterates") {
    const ProblemSpec spec = pde_reference_problem();
    const FemSpace space = build_space(spec, 16);
    const NodalField u_prev = interpolate(space, SpatialFunction{
        [](std::span<const double> x, int) { return 0.3 * pde_profile(x[0]); }, nullptr});
    const StepResult a = minimize_increment(space, u_prev, 1.7, spec, StepOptions{});
    const StepResult b = minimize_increment(space, u_prev, 1.7, spec, StepOptions{});
    REQUIRE(a.minimizer.size() == b.minimizer.size());
    for (std::size_t i = 0; i < a.minimizer.size(); ++i) CHECK(a.minimizer[i] == b.minimizer[i]);
    CHECK(a.certificate.iterations == b.certificate.iterations);
}

TEST_CASE("iteration cap raises NoConvergence") {
    const ProblemSpec spec = pde_reference_problem();
    const FemSpace space = build_space(spec, 32);
    NodalField zero;
    zero.coeffs.assign(space.n_dofs(), 0.0);
    StepOptions opts;
    opts.max_iterations = 2;
    CHECK_THROWS_AS(minimize_increment(space, zero, 2.0, spec, opts), NoConvergence);
}

TEST_CASE("lying curvature bound raises NonConvexTotal") {
    ScalarIncrement inc(0.0);
    EnergyDensity stiff = builtin_quadratic(100.0);
    stiff.curvature_bound = [](double) { return 0.01; };
    inc.data.energy = &stiff;
    CHECK_THROWS_AS(minimize_increment_data(inc.data, Vector{1.0}, StepOptions{}), NonConvexTotal);
}

} // TEST_SUITE
