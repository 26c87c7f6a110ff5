#pragma once

#include "infw/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace infw {

/// Exit codes shared by all commands.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitStalled = 2 };

inline constexpr const char* kMetricsHeaderComment = "# infw metrics v1";
inline constexpr const char* kMetricsColumns = "stage,iter,energy,h,lambda,grad_norm,linf_times_sqrtA";

struct MeshCommand {
    int icosphere = 3;
    double radius = 1.0;
    std::optional<double> area;
    double perturb = 0.0;
    std::uint64_t seed = 0;
    std::filesystem::path output;
};

struct VerifyCommand {
    std::filesystem::path mesh;
    double p = 4.0;
    double epsilon = 0.0;
    double sigma = 0.0;
    std::optional<std::filesystem::path> reference;
    std::optional<double> area;  // defaults to the mesh's own area
    WeightSpec weight = ConstantWeight{};
    ThreeValueOptions three_value;
};

int cmd_mesh(const MeshCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyCommand& cmd, std::ostream& out, std::ostream& err);

/// Formats one metrics.csv line (no trailing newline).
std::string format_metrics_row(const MetricsRow& row);

/// The report.json document written by `run`.
nlohmann::json run_report_json(const RunResult& result, const EnergyParams& params);

/// Resolves sigma for a run: explicit value, or 10 * h_2 of the start mesh
/// (rescaled to A) when a reference is given, otherwise 0.
EnergyParams run_params(const RunConfig& config, const TriMesh& start);

/// Full command-line entry point (argv[0] is the program name).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace infw
