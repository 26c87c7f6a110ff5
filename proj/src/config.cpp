#include "infw/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace infw {

namespace {

std::string where(const YAML::Node& node)
{
    return "line " + std::to_string(node.Mark().line + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& msg)
{
    throw ConfigError("config " + where(node) + ": " + msg);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key)
{
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(node, "invalid value for '" + key + "'");
    }
}

Vec3 vec3(const YAML::Node& node, const std::string& key)
{
    if (!node.IsSequence() || node.size() != 3) fail(node, "'" + key + "' must be a list of 3 numbers");
    return {scalar<double>(node[0], key), scalar<double>(node[1], key), scalar<double>(node[2], key)};
}

void check_keys(const YAML::Node& table, const std::string& name, const std::set<std::string>& allowed)
{
    if (!table.IsMap()) fail(table, "'" + name + "' must be a table");
    for (const auto& kv : table) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) fail(kv.first, "unknown key '" + key + "' in '" + name + "'");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::filesystem::path existing(const YAML::Node& node, const std::filesystem::path& base,
                               const std::string& key)
{
    auto path = resolve(base, scalar<std::string>(node, key));
    if (!std::filesystem::exists(path)) fail(node, "'" + key + "' file not found: " + path.string());
    return path;
}

WeightSpec parse_weight(const YAML::Node& w)
{
    check_keys(w, "weight", {"type", "value", "center", "c", "axis"});
    const auto type = w["type"] ? scalar<std::string>(w["type"], "type") : std::string("constant");
    WeightSpec spec;
    if (type == "constant") {
        ConstantWeight c;
        if (w["value"]) c.value = scalar<double>(w["value"], "value");
        spec = c;
    } else if (type == "radial_quadratic") {
        RadialQuadraticWeight r;
        if (w["center"]) r.center = vec3(w["center"], "center");
        if (w["c"]) r.c = scalar<double>(w["c"], "c");
        spec = r;
    } else if (type == "axis_quadratic") {
        AxisQuadraticWeight a;
        if (w["axis"]) a.axis = vec3(w["axis"], "axis").normalized();
        if (w["c"]) a.c = scalar<double>(w["c"], "c");
        spec = a;
    } else {
        fail(w["type"], "unknown weight type '" + type + "'");
    }
    try {
        check_weight(spec);
    } catch (const std::invalid_argument& e) {
        fail(w, e.what());
    }
    return spec;
}

} // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("config line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root.IsMap()) throw ConfigError("config: top level must be a table");
    check_keys(root, "config", {"mesh", "energy", "weight", "schedule", "output", "verify"});

    RunConfig cfg;
    if (const auto m = root["mesh"]) {
        check_keys(m, "mesh", {"obj", "icosphere", "radius", "perturb", "seed"});
        if (m["obj"]) cfg.mesh.obj = existing(m["obj"], base_dir, "obj");
        if (m["icosphere"]) {
            cfg.mesh.icosphere = scalar<int>(m["icosphere"], "icosphere");
            if (cfg.mesh.icosphere < 0 || cfg.mesh.icosphere > 8)
                fail(m["icosphere"], "icosphere must be in [0, 8]");
        }
        if (m["radius"]) {
            cfg.mesh.radius = scalar<double>(m["radius"], "radius");
            if (!(cfg.mesh.radius > 0.0)) fail(m["radius"], "radius must be positive");
        }
        if (m["perturb"]) {
            cfg.mesh.perturb = scalar<double>(m["perturb"], "perturb");
            if (!(cfg.mesh.perturb >= 0.0 && cfg.mesh.perturb < 1.0))
                fail(m["perturb"], "perturb must be in [0, 1)");
        }
        if (m["seed"]) cfg.mesh.seed = scalar<std::uint64_t>(m["seed"], "seed");
    }
    if (const auto e = root["energy"]) {
        check_keys(e, "energy", {"area", "sigma", "reference"});
        if (e["area"]) {
            cfg.area = scalar<double>(e["area"], "area");
            if (!(cfg.area > 0.0)) fail(e["area"], "area must be positive");
        }
        if (e["sigma"]) {
            cfg.sigma = scalar<double>(e["sigma"], "sigma");
            if (!(*cfg.sigma >= 0.0)) fail(e["sigma"], "sigma must be >= 0");
        }
        if (e["reference"]) cfg.reference = existing(e["reference"], base_dir, "reference");
        if (cfg.sigma && *cfg.sigma > 0.0 && !cfg.reference)
            fail(e, "reference required when sigma > 0");
    }
    if (const auto w = root["weight"]) cfg.weight = parse_weight(w);
    if (std::holds_alternative<AxisQuadraticWeight>(cfg.weight) &&
        !(cfg.reference && cfg.sigma.value_or(1.0) > 0.0))
        fail(root["weight"], "axis_quadratic weight is not coercive and needs sigma > 0 with a reference");

    if (const auto s = root["schedule"]) {
        check_keys(s, "schedule",
                   {"p", "epsilon_scale", "max_iters", "step_init", "grad_tol", "armijo_c", "backtrack",
                    "max_backtracks", "energy_rtol", "stationary_window", "tangential_smoothing",
                    "smoothing_every", "smoothing_strength"});
        auto& sch = cfg.schedule;
        if (s["p"]) {
            if (!s["p"].IsSequence()) fail(s["p"], "'p' must be a list");
            sch.p_list.clear();
            for (const auto& v : s["p"]) sch.p_list.push_back(scalar<double>(v, "p"));
        }
        if (s["epsilon_scale"]) sch.epsilon_scale = scalar<double>(s["epsilon_scale"], "epsilon_scale");
        if (s["max_iters"]) sch.max_iters_per_stage = scalar<int>(s["max_iters"], "max_iters");
        if (s["step_init"]) sch.step_init = scalar<double>(s["step_init"], "step_init");
        if (s["grad_tol"]) sch.grad_tol = scalar<double>(s["grad_tol"], "grad_tol");
        if (s["armijo_c"]) sch.armijo_c = scalar<double>(s["armijo_c"], "armijo_c");
        if (s["backtrack"]) sch.backtrack = scalar<double>(s["backtrack"], "backtrack");
        if (s["max_backtracks"]) sch.max_backtracks = scalar<int>(s["max_backtracks"], "max_backtracks");
        if (s["energy_rtol"]) sch.energy_rtol = scalar<double>(s["energy_rtol"], "energy_rtol");
        if (s["stationary_window"])
            sch.stationary_window = scalar<int>(s["stationary_window"], "stationary_window");
        if (s["tangential_smoothing"])
            sch.tangential_smoothing = scalar<bool>(s["tangential_smoothing"], "tangential_smoothing");
        if (s["smoothing_every"]) sch.smoothing_every = scalar<int>(s["smoothing_every"], "smoothing_every");
        if (s["smoothing_strength"])
            sch.smoothing_strength = scalar<double>(s["smoothing_strength"], "smoothing_strength");
        try {
            sch.check();
        } catch (const std::invalid_argument& ex) {
            fail(s, ex.what());
        }
    }
    if (const auto o = root["output"]) {
        check_keys(o, "output", {"dir", "snapshot_every"});
        if (o["dir"]) cfg.output_dir = resolve(base_dir, scalar<std::string>(o["dir"], "dir"));
        if (o["snapshot_every"]) {
            cfg.snapshot_every = scalar<int>(o["snapshot_every"], "snapshot_every");
            if (cfg.snapshot_every < 0) fail(o["snapshot_every"], "snapshot_every must be >= 0");
        }
    } else {
        cfg.output_dir = base_dir / cfg.output_dir;
    }
    if (const auto v = root["verify"]) {
        check_keys(v, "verify", {"tau", "delta_c"});
        if (v["tau"]) cfg.three_value.tau = scalar<double>(v["tau"], "tau");
        if (v["delta_c"]) cfg.three_value.delta_c = scalar<double>(v["delta_c"], "delta_c");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

TriMesh make_mesh(const MeshSource& source)
{
    TriMesh mesh = source.obj ? load_obj(*source.obj) : build_icosphere(source.icosphere, source.radius);
    require_valid(mesh);
    if (source.perturb > 0.0) mesh = perturb_radial(mesh, source.perturb, source.seed);
    require_valid(mesh);
    return mesh;
}

} // namespace infw
