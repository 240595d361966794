#pragma once

#include "risolve/estimates.hpp"
#include "risolve/mesh.hpp"
#include "risolve/model.hpp"
#include "risolve/rothe.hpp"

#include <json.hpp>

#include <string>

namespace risolve {

/// Builds a problem from a JSON document of named presets:
/// {
///   "d": 1, "m": 1, "T": 2.0,
///   "dissipation": {"type": "abs", "scale": 1.0},
///   "energy": {"type": "quadratic"|"double_well"|"power", ...},
///   "tensor": {"type": "identity"|"isotropic_affine", ...},
///   "force": {"type": "zero"|"linear_t"|"rough_power", ...},
///   "initial": {"type": "zero"|"constant", ...}
/// }
ProblemSpec spec_from_json(const nlohmann::json& j);
ProblemSpec spec_from_file(const std::string& path);

nlohmann::json mesh_to_json(const SimplicialMesh& mesh);

struct RunConfig {
    ProblemSpec problem;
    StepOptions step;
    int n_space = 16;
    int n_time = 100;
    std::uint64_t seed = 2718281828;
    std::vector<FamilyLevel> verify_levels;
    nlohmann::json raw;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig config_from_file(const std::string& path);

} // namespace risolve
