#include "risolve/json_io.hpp"

#include "risolve/errors.hpp"

#include <fstream>

namespace risolve {

using nlohmann::json;

namespace {

json section(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(std::string("problem JSON missing field '") + key + "'");
    return j.at(key);
}

} // namespace

ProblemSpec spec_from_json(const json& j) {
    ProblemSpec spec;
    spec.d = j.value("d", 1);
    spec.m = j.value("m", 1);
    spec.T = j.value("T", 1.0);
    if (spec.d != 1 && spec.d != 2) throw Error("problem JSON: d must be 1 or 2");
    if (spec.m < 1) throw Error("problem JSON: m must be >= 1");
    if (!(spec.T > 0.0)) throw Error("problem JSON: T must be > 0");
    spec.bypass_admissibility = j.value("bypass_admissibility", false);

    {
        const json s = section(j, "dissipation");
        const std::string type = s.value("type", "abs");
        if (type == "abs")
            spec.dissipation = builtin_abs_dissipation(s.value("scale", 1.0));
        else
            throw Error("unknown dissipation preset: " + type);
    }
    {
        const json s = section(j, "energy");
        const std::string type = s.value("type", "quadratic");
        if (type == "quadratic")
            spec.energy = builtin_quadratic(s.value("scale", 1.0));
        else if (type == "double_well")
            spec.energy = builtin_double_well(s.value("gamma", 0.1));
        else if (type == "power")
            spec.energy = builtin_power(s.value("q", 2.0));
        else
            throw Error("unknown energy preset: " + type);
    }
    {
        const json s = section(j, "tensor");
        const std::string type = s.value("type", "identity");
        if (type == "identity")
            spec.tensor = identity_tensor(spec.d, spec.m, s.value("kappa", 1.0));
        else if (type == "isotropic_affine")
            spec.tensor = isotropic_affine_tensor(spec.d, spec.m, s.value("a0", 1.0),
                                                  s.value("at", 0.0), s.value("ax", 0.0));
        else
            throw Error("unknown tensor preset: " + type);
    }
    {
        const json s = section(j, "force");
        const std::string type = s.value("type", "zero");
        if (type == "zero")
            spec.force = zero_force(spec.d, spec.m);
        else if (type == "linear_t")
            spec.force = linear_time_force(spec.d, spec.m, s.value("coeff", 1.0));
        else if (type == "rough_power")
            spec.force = rough_power_force(spec.d, spec.m, s.value("coeff", 1.0),
                                           s.value("exponent", 0.4));
        else
            throw Error("unknown force preset: " + type);
    }
    {
        const json s = section(j, "initial");
        const std::string type = s.value("type", "zero");
        if (type == "zero") {
            spec.initial = zero_initial(spec.m);
            spec.initial_name = "zero";
        } else if (type == "constant") {
            std::vector<double> value = s.value("value", std::vector<double>{0.0});
            spec.initial = constant_initial(value);
            spec.initial_name = "constant";
        } else {
            throw Error("unknown initial preset: " + type);
        }
    }
    return spec;
}

ProblemSpec spec_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file: " + path);
    json j;
    in >> j;
    return spec_from_json(j);
}

json mesh_to_json(const SimplicialMesh& mesh) {
    json j;
    j["dim"] = mesh.dim;
    j["h"] = mesh.h;
    j["rho"] = mesh.rho;
    json verts = json::array();
    for (const auto& v : mesh.vertices) {
        if (mesh.dim == 1)
            verts.push_back({v[0]});
        else
            verts.push_back({v[0], v[1]});
    }
    j["vertices"] = std::move(verts);
    json cells = json::array();
    for (const auto& c : mesh.cells) {
        if (mesh.dim == 1)
            cells.push_back({c[0], c[1]});
        else
            cells.push_back({c[0], c[1], c[2]});
    }
    j["cells"] = std::move(cells);
    json bnd = json::array();
    for (std::size_t v = 0; v < mesh.boundary.size(); ++v)
        if (mesh.boundary[v]) bnd.push_back(static_cast<int>(v));
    j["boundary"] = std::move(bnd);
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    cfg.raw = j;
    cfg.problem = spec_from_json(section(j, "problem"));
    if (j.contains("increment")) {
        const json s = j.at("increment");
        cfg.step.tolerance = s.value("tolerance", cfg.step.tolerance);
        cfg.step.max_iterations = s.value("max_iterations", cfg.step.max_iterations);
        cfg.step.safety_factor = s.value("safety_factor", cfg.step.safety_factor);
        cfg.step.acceleration = s.value("acceleration", cfg.step.acceleration);
    }
    cfg.n_space = j.value("n_space", cfg.n_space);
    cfg.n_time = j.value("n_time", cfg.n_time);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("verify") && j.at("verify").contains("levels")) {
        for (const auto& lvl : j.at("verify").at("levels"))
            cfg.verify_levels.push_back({lvl.at(0).get<int>(), lvl.at(1).get<int>()});
    }
    return cfg;
}

RunConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    json j;
    in >> j;
    return config_from_json(j);
}

} // namespace risolve
