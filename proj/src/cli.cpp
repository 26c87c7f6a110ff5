#include "infw/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace infw {

namespace {

nlohmann::json validation_json(const ValidationReport& v)
{
    return {{"ok", v.ok()},
            {"closed_manifold", v.closed_manifold},
            {"consistently_oriented", v.consistently_oriented},
            {"euler_characteristic", v.euler_characteristic},
            {"min_triangle_area", v.min_triangle_area},
            {"min_triangle_quality", v.min_triangle_quality},
            {"negative_cotan_weights", v.negative_cotan_weights},
            {"problems", v.problems}};
}

nlohmann::json stage_json(const StageSummary& s)
{
    return {{"p", s.p},
            {"epsilon", s.epsilon},
            {"iterations", s.iterations},
            {"reason", to_string(s.reason)},
            {"energy", s.energy},
            {"h", s.h},
            {"h_power_mean", s.h_power_mean},
            {"lambda", s.lambda},
            {"low_energy_value", s.low_energy_value},
            {"residual_l2", s.residual_l2},
            {"alignment_residual", s.alignment_residual},
            {"concentration", s.concentration},
            {"max_abs_w", s.max_abs_w}};
}

std::string snapshot_name(int stage)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "stage_%02d.obj", stage);
    return buf;
}

WeightSpec weight_from_flags(const std::string& type, const std::vector<double>& center, double c,
                             const std::vector<double>& axis)
{
    if (type == "constant") return ConstantWeight{};
    if (type == "radial_quadratic") {
        RadialQuadraticWeight w;
        if (!center.empty()) w.center = Vec3(center[0], center[1], center[2]);
        w.c = c;
        return w;
    }
    if (type == "axis_quadratic") {
        AxisQuadraticWeight w;
        if (!axis.empty()) w.axis = Vec3(axis[0], axis[1], axis[2]).normalized();
        w.c = c;
        return w;
    }
    throw std::invalid_argument("unknown weight type '" + type + "'");
}

} // namespace

std::string format_metrics_row(const MetricsRow& r)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g", r.stage, r.iter, r.energy, r.h,
                  r.lambda, r.grad_norm, r.linf_times_sqrt_area);
    return buf;
}

int cmd_mesh(const MeshCommand& cmd, std::ostream& out, std::ostream& err)
{
    try {
        if (cmd.output.empty()) throw std::invalid_argument("mesh: output path (-o) is required");
        if (!(cmd.radius > 0.0)) throw std::invalid_argument("mesh: radius must be positive");
        if (cmd.area && !(*cmd.area > 0.0)) throw std::invalid_argument("mesh: area must be positive");
        if (!(cmd.perturb >= 0.0 && cmd.perturb < 1.0))
            throw std::invalid_argument("mesh: perturb must be in [0, 1)");
        TriMesh mesh = build_icosphere(cmd.icosphere, cmd.radius);
        if (cmd.perturb > 0.0) mesh = perturb_radial(mesh, cmd.perturb, cmd.seed);
        if (cmd.area) mesh = rescale_to_area(mesh, *cmd.area);
        require_valid(mesh);
        save_obj(mesh, cmd.output);
        char buf[256];
        std::snprintf(buf, sizeof buf, "V=%zu E=%zu F=%zu chi=%d area=%.17g\n", mesh.num_vertices(),
                      mesh.num_edges(), mesh.num_faces(), mesh.topology().euler_characteristic(),
                      total_area(mesh));
        out << buf;
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

EnergyParams run_params(const RunConfig& config, const TriMesh& start)
{
    EnergyParams params;
    params.target_area = config.area;
    params.weight = config.weight;
    if (config.reference) {
        auto ref_mesh = load_obj(*config.reference);
        params.reference = std::make_shared<const ReferenceSurface>(std::move(ref_mesh));
    }
    if (config.sigma) {
        params.sigma = *config.sigma;
    } else if (params.reference) {
        EnergyParams probe = params;
        probe.p = 2.0;
        probe.sigma = 0.0;
        params.sigma = 10.0 * lp_energy(rescale_to_area(start, config.area), probe);
    }
    check_params(params);
    return params;
}

nlohmann::json run_report_json(const RunResult& result, const EnergyParams& params)
{
    nlohmann::json j;
    j["status"] = to_string(result.status);
    j["message"] = result.message;
    j["target_area"] = params.target_area;
    j["sigma"] = params.sigma;
    j["weight"] = weight_name(params.weight);
    j["final"] = result.reports.empty() ? nlohmann::json(nullptr) : to_json(result.reports.back());
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : result.stages) stages.push_back(stage_json(s));
    j["stages"] = stages;
    j["low_energy"] = {{"threshold", kLowEnergyThreshold},
                       {"initial_ok", result.initial_low_energy_ok},
                       {"initial_value", result.initial_low_energy_value},
                       {"trace", result.low_energy_trace}};
    j["final_sphericity"] = sphericity(result.mesh);
    return j;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        const TriMesh start = make_mesh(config.mesh);
        const EnergyParams params = run_params(config, start);
        std::filesystem::create_directories(config.output_dir);

        std::ofstream csv(config.output_dir / "metrics.csv");
        if (!csv) throw std::runtime_error("cannot write " + (config.output_dir / "metrics.csv").string());
        csv << kMetricsHeaderComment << "\n" << kMetricsColumns << "\n";

        RunObserver observer;
        observer.on_row = [&](const MetricsRow& row) { csv << format_metrics_row(row) << "\n"; };
        observer.on_stage_end = [&](int stage, const TriMesh& mesh) {
            out << "stage " << stage << " (p=" << config.schedule.p_list[static_cast<std::size_t>(stage)]
                << ") done\n";
            if (config.snapshot_every > 0 && (stage + 1) % config.snapshot_every == 0)
                save_obj(mesh, config.output_dir / snapshot_name(stage));
        };
        RunOptions options;
        options.three_value = config.three_value;

        const RunResult result = continuation_run(start, params, config.schedule, observer, options);
        csv.flush();
        save_obj(result.mesh, config.output_dir / "final.obj");
        {
            std::ofstream rep(config.output_dir / "report.json");
            rep << run_report_json(result, params).dump(2) << "\n";
            if (!rep) throw std::runtime_error("cannot write report.json");
        }
        out << "status: " << to_string(result.status) << "\n";
        if (!result.stages.empty()) {
            const auto& last = result.stages.back();
            out << "final h=" << last.h << " lambda=" << last.lambda << " residual_l2=" << last.residual_l2
                << " sphericity=" << sphericity(result.mesh) << "\n";
        }
        switch (result.status) {
        case RunStatus::Converged: return kExitOk;
        case RunStatus::Stalled: return kExitStalled;
        case RunStatus::Aborted:
            err << "error: " << result.message << "\n";
            return kExitError;
        }
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err)
{
    try {
        const TriMesh mesh = load_obj(cmd.mesh);
        const ValidationReport v = validate(mesh);
        if (!v.ok()) {
            out << nlohmann::json{{"validation", validation_json(v)}}.dump(2) << "\n";
            err << "error: mesh does not validate\n";
            return kExitError;
        }
        EnergyParams params;
        params.p = cmd.p;
        params.epsilon = cmd.epsilon;
        params.sigma = cmd.sigma;
        params.weight = cmd.weight;
        params.target_area = cmd.area ? *cmd.area : total_area(mesh);
        if (cmd.reference)
            params.reference = std::make_shared<const ReferenceSurface>(load_obj(*cmd.reference));
        check_weight(params.weight);
        check_params(params);

        const auto sample = sample_surface(mesh, params);
        const ELReport report = three_value_report(sample, params, cmd.three_value);
        const auto le = low_energy_check(sample, params);
        nlohmann::json j = to_json(report);
        j["validation"] = validation_json(v);
        j["low_energy"] = {{"ok", le.ok}, {"value", le.value}, {"threshold", kLowEnergyThreshold}};
        j["area"] = total_area(mesh);
        j["target_area"] = params.target_area;
        out << j.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Weighted L^p / L^inf mean-curvature minimization on closed triangle meshes", "infw"};
    app.require_subcommand(1);

    MeshCommand mesh_cmd;
    double mesh_area = 0.0;
    auto* mesh = app.add_subcommand("mesh", "Generate an icosphere mesh and write it as OBJ");
    mesh->add_option("--icosphere", mesh_cmd.icosphere, "Subdivision level (0..8)")->capture_default_str();
    mesh->add_option("--radius", mesh_cmd.radius, "Sphere radius")->capture_default_str();
    auto* area_opt = mesh->add_option("--area", mesh_area, "Rescale to this total area");
    mesh->add_option("--perturb", mesh_cmd.perturb, "Relative radial noise amplitude");
    mesh->add_option("--seed", mesh_cmd.seed, "Noise seed");
    mesh->add_option("-o,--output", mesh_cmd.output, "Output OBJ path")->required();

    std::string config_path;
    std::optional<int> max_iters;
    std::optional<std::uint64_t> seed;
    std::optional<double> perturb;
    std::optional<double> sigma_override;
    std::optional<double> eps_scale;
    std::vector<double> p_list;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run the continuation ladder described by a config file");
    run->add_option("config", config_path, "YAML run configuration")->required();
    run->add_option("--max-iters", max_iters, "Override schedule.max_iters");
    run->add_option("--seed", seed, "Override mesh.seed");
    run->add_option("--perturb", perturb, "Override mesh.perturb");
    run->add_option("--sigma", sigma_override, "Override energy.sigma");
    run->add_option("--epsilon-scale", eps_scale, "Override schedule.epsilon_scale");
    run->add_option("--p", p_list, "Override the p ladder");
    run->add_option("-o,--output-dir", out_dir, "Override output.dir");

    VerifyCommand verify_cmd;
    std::string weight_type = "constant";
    std::vector<double> center;
    std::vector<double> axis;
    double weight_c = 1.0;
    double verify_area = 0.0;
    std::string reference;
    auto* verify = app.add_subcommand("verify", "Print the Euler-Lagrange report of a mesh as JSON");
    verify->add_option("mesh", verify_cmd.mesh, "OBJ mesh")->required();
    verify->add_option("--p", verify_cmd.p, "Exponent p")->capture_default_str();
    verify->add_option("--epsilon", verify_cmd.epsilon, "Regularization eps")->capture_default_str();
    verify->add_option("--sigma", verify_cmd.sigma, "Penalisation weight")->capture_default_str();
    verify->add_option("--reference", reference, "Reference OBJ for the penalisation");
    auto* varea = verify->add_option("--area", verify_area, "Target area (default: the mesh's area)");
    verify->add_option("--weight", weight_type, "constant | radial_quadratic | axis_quadratic")
        ->capture_default_str();
    verify->add_option("--center", center, "Radial weight center")->expected(3);
    verify->add_option("--axis", axis, "Axis weight direction")->expected(3);
    verify->add_option("--c", weight_c, "Weight coefficient");
    verify->add_option("--tau", verify_cmd.three_value.tau, "Nodal threshold")->capture_default_str();
    verify->add_option("--delta-c", verify_cmd.three_value.delta_c, "Concentration band")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    if (mesh->parsed()) {
        if (area_opt->count() > 0) mesh_cmd.area = mesh_area;
        return cmd_mesh(mesh_cmd, out, err);
    }
    if (run->parsed()) {
        RunConfig config;
        try {
            config = load_run_config(config_path);
            if (max_iters) config.schedule.max_iters_per_stage = *max_iters;
            if (seed) config.mesh.seed = *seed;
            if (perturb) config.mesh.perturb = *perturb;
            if (sigma_override) config.sigma = *sigma_override;
            if (eps_scale) config.schedule.epsilon_scale = *eps_scale;
            if (!p_list.empty()) config.schedule.p_list = p_list;
            if (!out_dir.empty()) config.output_dir = out_dir;
            config.schedule.check();
            if (config.sigma && *config.sigma > 0.0 && !config.reference)
                throw ConfigError("reference required when sigma > 0");
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kExitError;
        }
        return cmd_run(config, out, err);
    }
    if (verify->parsed()) {
        try {
            verify_cmd.weight = weight_from_flags(weight_type, center, weight_c, axis);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kExitError;
        }
        if (varea->count() > 0) verify_cmd.area = verify_area;
        if (!reference.empty()) verify_cmd.reference = reference;
        return cmd_verify(verify_cmd, out, err);
    }
    return kExitError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace infw
