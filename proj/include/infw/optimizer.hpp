#pragma once

#include "infw/el_verifier.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace infw {

/// Continuation ladder and line-search settings.
///
/// Step lengths are in units of the reference radius L = sqrt(A / 4 pi): a
/// trial step of length t moves vertex i by t * L^2 * phi_i along nu_i, which
/// makes t scale like a length and keeps configurations transferable between
/// target areas.
struct Schedule {
    std::vector<double> p_list{2, 4, 8, 16, 32, 64};
    /// eps(p) = epsilon_scale / p^2 * (4 pi / A).
    double epsilon_scale = 1e-2;
    int max_iters_per_stage = 2000;
    /// Initial step length; <= 0 selects 1e-3 * L.
    double step_init = 0.0;
    /// Stage converges when ||phi||_{L^2(mu)} / (h^2 sqrt(A)) falls below this.
    double grad_tol = 1e-4;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
    /// Stage is stationary when the energy dropped by less than
    /// energy_rtol * |E| over the last stationary_window accepted steps.
    double energy_rtol = 1e-9;
    int stationary_window = 100;

    bool tangential_smoothing = false;
    int smoothing_every = 10;
    double smoothing_strength = 0.2;
    /// Smoothing is undone when the energy rises by more than this fraction.
    double smoothing_tolerance = 1e-3;

    double epsilon_for(double p, double target_area) const;
    double initial_step(double target_area) const;
    void check() const;
};

enum class StageReason { Converged, Stationary, MaxIterations, Stalled };
std::string to_string(StageReason r);

struct MetricsRow {
    int stage = 0;
    int iter = 0;
    double energy = 0.0;
    double h = 0.0;
    double lambda = 0.0;
    double grad_norm = 0.0;
    double linf_times_sqrt_area = 0.0;
};

/// Mutable run state for one stage; the mesh itself is an immutable value that
/// is replaced on every accepted step.
struct OptState {
    TriMesh mesh;
    EnergyParams params;
    int stage = 0;
    int iter = 0;
    double step = 0.0;
    double energy = 0.0;
    std::vector<double> energy_history;
    std::vector<double> lambda_history;
    std::optional<StageReason> termination;
};

/// G (lambda-free Euler-Lagrange density) and w.
struct ELDensity {
    VertexField G;
    VertexField w;
};

ELDensity el_density(const TriMesh& mesh, const EnergyParams& params);

/// Multiplier for the area constraint: lambda = sum G H a / sum H^2 a, so
/// that the flow speed phi = G - lambda H satisfies sum phi H a = 0.
double lambda_estimate(const TriMesh& mesh, const EnergyParams& params);

/// Outward normal speed phi = G - lambda H; moving along +phi nu decreases the
/// energy to first order while keeping the area stationary.
struct FlowField {
    VertexField phi;
    std::vector<Vec3> normal;
    double lambda = 0.0;
    double h = 0.0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double linf_times_sqrt_area = 0.0;
};

FlowField flow_field(const TriMesh& mesh, const EnergyParams& params);

/// One Armijo-backtracked explicit step followed by rescaling to area A.
/// Sets state.termination when the stage ends (converged or stalled).
void flow_step(OptState& state, const Schedule& schedule);
/// Same, reusing a flow field already evaluated on state.mesh.
void flow_step(OptState& state, const Schedule& schedule, const FlowField& flow);

struct StageSummary {
    double p = 0.0;
    double epsilon = 0.0;
    int iterations = 0;
    StageReason reason = StageReason::MaxIterations;
    double energy = 0.0;
    double h = 0.0;          // h_{p,eps}
    double h_power_mean = 0.0;  // h_p with eps = 0
    double lambda = 0.0;
    double low_energy_value = 0.0;
    double residual_l2 = 0.0;
    double alignment_residual = 0.0;
    double concentration = 0.0;
    double max_abs_w = 0.0;
};

enum class RunStatus { Converged, Stalled, Aborted };
std::string to_string(RunStatus s);

struct RunResult {
    TriMesh mesh;
    RunStatus status = RunStatus::Converged;
    std::string message;
    std::vector<StageSummary> stages;
    std::vector<ELReport> reports;  // one per stage
    std::vector<MetricsRow> history;
    std::vector<double> low_energy_trace;  // per stage, ||xi H||_inf sqrt(A)
    bool initial_low_energy_ok = false;
    double initial_low_energy_value = 0.0;
};

struct RunObserver {
    std::function<void(const MetricsRow&)> on_row;
    std::function<void(int stage, const TriMesh&)> on_stage_end;
};

struct RunOptions {
    ThreeValueOptions three_value;
};

/// Warm-started minimization over the p ladder with eps(p) shrinking as p
/// grows. `base` supplies sigma, A, the weight and the reference; p and eps
/// are overwritten per stage.
RunResult continuation_run(const TriMesh& initial, const EnergyParams& base,
                           const Schedule& schedule, const RunObserver& observer = {},
                           const RunOptions& options = {});

/// One tangential relaxation pass: each vertex moves toward the mean of its
/// neighbours, with the normal component removed.
TriMesh tangential_relax(const TriMesh& mesh, double strength);

/// std(|f_i - c|) / mean(|f_i - c|) about the area centroid.
double sphericity(const TriMesh& mesh);

/// Symmetric Hausdorff distance estimated from vertices to the other surface.
double hausdorff_distance(const TriMesh& a, const TriMesh& b);

} // namespace infw
