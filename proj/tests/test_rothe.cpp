#include "risolve/rothe.hpp"

#include "risolve/errors.hpp"
#include "risolve/harness.hpp"
#include "risolve/zero_dim.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace risolve;
using risolve::testing::h1_norm;

TEST_SUITE("rothe") {

TEST_CASE("zero data stays zero") {
    ProblemSpec spec = pde_reference_problem(1.0);
    spec.force = zero_force(1, 1);
    const FemSpace space = build_space(spec, 8);
    const Trajectory traj = run(spec, space, 5);
    for (const auto& f : traj.fields)
        for (double v : f.coeffs) CHECK(v == 0.0);
    CHECK(traj.initial_stable);
}

TEST_CASE("manufactured 1-d problem hits the closed form") {
    const ProblemSpec spec = pde_reference_problem(2.0);
    const FemSpace space = build_space(spec, 64);
    const Trajectory traj = run(spec, space, 2000);

    const double x = 0.5;
    CHECK(std::abs(traj.evaluate(2.0, &x) - scalar_pde_reference(0.5, 2.0).value) < 5e-3);

    // before the activation time the solution is identically zero
    const NodalField early = traj.interpolate(0.5);
    CHECK(h1_norm(space, early) <= 1e-8);

    CHECK(traj.initial_stable);
    CHECK(traj.initial_margin <= 1e-8);
    for (const auto& c : traj.certificates) CHECK(c.objective_decreased);

    // difference quotient convention at k = 0
    const NodalField d0 = traj.difference_quotient(0);
    for (double v : d0.coeffs) CHECK(v == 0.0);
}

TEST_CASE("trajectory interpolant is affine between grid points") {
    const ProblemSpec spec = pde_reference_problem(2.0);
    const FemSpace space = build_space(spec, 16);
    const Trajectory traj = run(spec, space, 40);
    const int k = 30;
    const double tm = traj.times[k - 1] + 0.5 * traj.tau;
    const NodalField mid = traj.interpolate(tm);
    for (int i = 0; i < space.n_dofs(); ++i)
        CHECK(mid.coeffs[i] == doctest::Approx(0.5 * (traj.fields[k - 1].coeffs[i] +
                                                      traj.fields[k].coeffs[i]))
                                   .epsilon(1e-13));
    CHECK(traj.interpolate(traj.times[k]).coeffs == traj.fields[k].coeffs);
}

TEST_CASE("initial stability probe") {
    ProblemSpec spec = pde_reference_problem(2.0);
    const FemSpace space = build_space(spec, 32);
    const StabilityProbe ok = check_initial_stability(spec, space);
    CHECK(ok.stable);
    CHECK(ok.margin <= 1e-9);

    // a large datum with zero force at t=0 moves immediately (a constant
    // would be projected to zero, so give it gradient content)
    spec.initial = [](std::span<const double> x, std::span<double> u) {
        u[0] = 5.0 * std::sin(std::numbers::pi * x[0]);
    };
    spec.initial_name = "large_sine";
    const StabilityProbe bad = check_initial_stability(spec, space);
    CHECK_FALSE(bad.stable);
    CHECK(bad.margin > 1e-3);

    const RunOptions opts;
    const Trajectory traj = run(spec, space, 3, opts); // warning-level, run continues
    CHECK_FALSE(traj.initial_stable);
    CHECK(traj.fields.size() == 4);
}

TEST_CASE("admissibility gate rejects strongly nonconvex wells") {
    ProblemSpec spec = pde_reference_problem(1.0);
    spec.energy = builtin_double_well(3.0);
    const FemSpace space = build_space(spec, 16);
    CHECK_THROWS_AS(run(spec, space, 4), AdmissibilityViolation);

    spec.bypass_admissibility = true;
    CHECK_NOTHROW(run(spec, space, 4));
}

TEST_CASE("admissible double well runs") {
    ProblemSpec spec = pde_reference_problem(1.0);
    spec.energy = builtin_double_well(0.1);
    const FemSpace space = build_space(spec, 16);
    const Trajectory traj = run(spec, space, 8);
    for (const auto& c : traj.certificates) CHECK(c.objective_decreased);
}

TEST_CASE("runs are deterministic") {
    const ProblemSpec spec = pde_reference_problem(2.0);
    const FemSpace space = build_space(spec, 16);
    const Trajectory a = run(spec, space, 50);
    const Trajectory b = run(spec, space, 50);
    for (int k = 0; k <= 50; ++k)
        for (int i = 0; i < space.n_dofs(); ++i)
            CHECK(a.fields[k].coeffs[i] == b.fields[k].coeffs[i]);
}

TEST_CASE("vector-valued evolution with block soft-thresholding") {
    ProblemSpec spec;
    spec.d = 1;
    spec.m = 2;
    spec.T = 2.0;
    spec.dissipation = builtin_abs_dissipation(1.0);
    spec.energy = builtin_quadratic(1.0);
    spec.tensor = identity_tensor(1, 2, 1.0);
    spec.force = linear_time_force(1, 2, 1.0);
    spec.initial = zero_initial(2);
    const FemSpace space = build_space(spec, 16);
    const Trajectory traj = run(spec, space, 50);
    for (const auto& c : traj.certificates) CHECK(c.objective_decreased);
    // both components feel the same force, so they evolve identically
    const auto& last = traj.fields.back().coeffs;
    for (int i = 0; i < space.n_nodes; ++i)
        CHECK(last[2 * i] == doctest::Approx(last[2 * i + 1]).epsilon(1e-12));
    CHECK(h1_seminorm(space, traj.fields.back()) > 0.05);
}

TEST_CASE("time-dependent tensor assembles per step") {
    ProblemSpec spec = pde_reference_problem(1.0);
    spec.tensor = isotropic_affine_tensor(1, 1, 1.0, 0.5, 0.0);
    const FemSpace space = build_space(spec, 16);
    const Trajectory traj = run(spec, space, 10);
    for (const auto& c : traj.certificates) CHECK(c.objective_decreased);
}

} // TEST_SUITE
