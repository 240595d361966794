#include "risolve/json_io.hpp"

#include "risolve/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace risolve;
using nlohmann::json;

namespace {

json exact_problem_json() {
    return json::parse(R"({
        "d": 1, "m": 1, "T": 2.0,
        "dissipation": {"type": "abs", "scale": 1.0},
        "energy": {"type": "quadratic"},
        "tensor": {"type": "identity", "kappa": 1.0},
        "force": {"type": "linear_t", "coeff": 1.0},
        "initial": {"type": "zero"}
    })");
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("problem presets load from JSON") {
    const ProblemSpec spec = spec_from_json(exact_problem_json());
    CHECK(spec.d == 1);
    CHECK(spec.T == 2.0);
    const double v[1] = {0.5};
    double g[1];
    spec.energy.gradient(std::span<const double>(v, 1), g);
    CHECK(g[0] == doctest::Approx(0.5));
    double f[1];
    spec.force.evaluate(1.5, std::span<const double>(v, 1), f);
    CHECK(f[0] == doctest::Approx(1.5));
}

TEST_CASE("unknown presets are rejected") {
    json j = exact_problem_json();
    j["energy"]["type"] = "mystery";
    CHECK_THROWS_AS(spec_from_json(j), Error);
    json missing = exact_problem_json();
    missing.erase("force");
    CHECK_THROWS_AS(spec_from_json(missing), Error);
}

TEST_CASE("double-well and rough-force presets") {
    json j = exact_problem_json();
    j["energy"] = {{"type", "double_well"}, {"gamma", 0.2}};
    j["force"] = {{"type", "rough_power"}, {"coeff", 1.0}, {"exponent", 0.4}};
    const ProblemSpec spec = spec_from_json(j);
    CHECK(spec.energy.semimonotonicity_mu == doctest::Approx(0.8));
    CHECK(spec.energy.growth_exponent_q == 4.0);
    CHECK(spec.force.time_exponent_a == doctest::Approx(1.0 / 0.6).epsilon(1e-6));
}

TEST_CASE("mesh export") {
    const json j = mesh_to_json(unit_square(2));
    CHECK(j.at("vertices").size() == 9);
    CHECK(j.at("cells").size() == 8);
    CHECK(j.at("boundary").size() == 8); // all but the center vertex
    CHECK(j.at("dim") == 2);

    const json j1 = mesh_to_json(unit_interval(4));
    CHECK(j1.at("vertices").size() == 5);
    CHECK(j1.at("cells").size() == 4);
    CHECK(j1.at("boundary") == json::array({0, 4}));
}

TEST_CASE("run config defaults and overrides") {
    json j;
    j["problem"] = exact_problem_json();
    j["increment"] = {{"tolerance", 1e-9}, {"acceleration", false}};
    j["n_space"] = 32;
    j["verify"] = {{"levels", {{8, 16}, {16, 32}}}};
    const RunConfig cfg = config_from_json(j);
    CHECK(cfg.step.tolerance == 1e-9);
    CHECK_FALSE(cfg.step.acceleration);
    CHECK(cfg.step.max_iterations == 100000);
    CHECK(cfg.n_space == 32);
    REQUIRE(cfg.verify_levels.size() == 2);
    CHECK(cfg.verify_levels[1].n == 16);
    CHECK(cfg.verify_levels[1].steps == 32);
}

} // TEST_SUITE
