#include "infw/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace infw {

namespace {

double reference_radius(double target_area)
{
    return std::sqrt(target_area / (4.0 * std::numbers::pi));
}

/// True when every face keeps a positive area and its orientation relative to
/// the same face of `before`.
bool faces_preserved(const TriMesh& before, const TriMesh& after, double min_area)
{
    const auto& P0 = before.positions();
    const auto& P1 = after.positions();
    for (const auto& t : before.triangles()) {
        const Vec3 n0 = (P0[t[1]] - P0[t[0]]).cross(P0[t[2]] - P0[t[0]]);
        const Vec3 n1 = (P1[t[1]] - P1[t[0]]).cross(P1[t[2]] - P1[t[0]]);
        if (!n1.allFinite() || n0.dot(n1) <= 0.0 || 0.5 * n1.norm() <= min_area) return false;
    }
    return true;
}

TriMesh displaced(const TriMesh& mesh, const FlowField& flow, double scale)
{
    std::vector<Vec3> out(mesh.positions());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * flow.phi[i] * flow.normal[i];
    return mesh.with_positions(std::move(out));
}

} // namespace

double Schedule::epsilon_for(double p, double target_area) const
{
    return epsilon_scale / (p * p) * (4.0 * std::numbers::pi / target_area);
}

double Schedule::initial_step(double target_area) const
{
    return step_init > 0.0 ? step_init : 1e-3 * reference_radius(target_area);
}

void Schedule::check() const
{
    if (p_list.empty()) throw std::invalid_argument("schedule: p list is empty");
    for (std::size_t k = 0; k < p_list.size(); ++k) {
        if (!(p_list[k] >= 2.0) || std::isinf(p_list[k]))
            throw std::invalid_argument("schedule: every p must be finite and >= 2");
        if (k > 0 && !(p_list[k] > p_list[k - 1]))
            throw std::invalid_argument("schedule: p list must be strictly increasing");
    }
    if (!(epsilon_scale > 0.0)) throw std::invalid_argument("schedule: epsilon scale must be > 0");
    if (max_iters_per_stage < 0) throw std::invalid_argument("schedule: max_iters must be >= 0");
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
        throw std::invalid_argument("schedule: armijo_c must be in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0))
        throw std::invalid_argument("schedule: backtrack factor must be in (0, 1)");
    if (max_backtracks < 1) throw std::invalid_argument("schedule: max_backtracks must be >= 1");
    if (!(grad_tol >= 0.0)) throw std::invalid_argument("schedule: grad_tol must be >= 0");
    if (stationary_window < 1) throw std::invalid_argument("schedule: stationary window must be >= 1");
    if (smoothing_every < 1) throw std::invalid_argument("schedule: smoothing_every must be >= 1");
}

std::string to_string(StageReason r)
{
    switch (r) {
    case StageReason::Converged: return "converged";
    case StageReason::Stationary: return "stationary";
    case StageReason::MaxIterations: return "max_iters";
    case StageReason::Stalled: return "stalled";
    }
    return "unknown";
}

std::string to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::Stalled: return "stalled";
    case RunStatus::Aborted: return "aborted";
    }
    return "unknown";
}

ELDensity el_density(const TriMesh& mesh, const EnergyParams& params)
{
    const auto sample = sample_surface(mesh, params);
    auto terms = el_terms(sample, params);
    return {std::move(terms.G), std::move(terms.w)};
}

double lambda_estimate(const TriMesh& mesh, const EnergyParams& params)
{
    const auto sample = sample_surface(mesh, params);
    return el_terms(sample, params).lambda;
}

FlowField flow_field(const TriMesh& mesh, const EnergyParams& params)
{
    const auto sample = sample_surface(mesh, params);
    const auto terms = el_terms(sample, params);
    const auto& H = sample.fields.H;
    const auto& a = sample.fields.measure;
    FlowField flow;
    flow.lambda = terms.lambda;
    flow.h = terms.h;
    flow.phi = terms.G - terms.lambda * H;
    flow.normal = sample.fields.normal;
    flow.energy = total_energy(sample, params);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < H.size(); ++i) sq += flow.phi[i] * flow.phi[i] * a[i];
    flow.grad_norm = std::sqrt(sq) / (terms.h * terms.h * std::sqrt(params.target_area));
    flow.linf_times_sqrt_area = low_energy_check(sample, params).value;
    return flow;
}

void flow_step(OptState& state, const Schedule& schedule)
{
    flow_step(state, schedule, flow_field(state.mesh, state.params));
}

void flow_step(OptState& state, const Schedule& schedule, const FlowField& flow)
{
    const EnergyParams& params = state.params;
    const double A = params.target_area;
    const double L2 = A / (4.0 * std::numbers::pi);
    state.energy = flow.energy;
    if (state.energy_history.empty()) state.energy_history.push_back(flow.energy);
    state.lambda_history.push_back(flow.lambda);

    if (flow.grad_norm <= schedule.grad_tol) {
        state.termination = StageReason::Converged;
        return;
    }

    // Predicted decrease per unit step: (L^2 / A) sum phi^2 a.
    double rate = 0.0;
    const VertexField a = vertex_measure(state.mesh);
    for (Eigen::Index i = 0; i < flow.phi.size(); ++i) rate += flow.phi[i] * flow.phi[i] * a[i];
    rate *= L2 / A;

    const double min_face_area = 1e-14 * A;
    double t = state.step > 0.0 ? 2.0 * state.step : schedule.initial_step(A);
    for (int attempt = 0; attempt <= schedule.max_backtracks; ++attempt, t *= schedule.backtrack) {
        TriMesh trial = displaced(state.mesh, flow, t * L2);
        if (!faces_preserved(state.mesh, trial, min_face_area)) continue;
        trial = rescale_to_area(trial, A);
        double energy = 0.0;
        try {
            energy = total_energy(trial, params);
        } catch (const EnergyError&) {
            continue;
        }
        if (!std::isfinite(energy)) continue;
        if (energy < state.energy && energy <= state.energy - schedule.armijo_c * t * rate) {
            state.mesh = std::move(trial);
            state.energy = energy;
            state.step = t;
            state.energy_history.push_back(energy);
            ++state.iter;
            return;
        }
    }
    state.termination = StageReason::Stalled;
}

TriMesh tangential_relax(const TriMesh& mesh, double strength)
{
    const auto& P = mesh.positions();
    const auto normals = vertex_normals(mesh);
    std::vector<Vec3> sum(P.size(), Vec3::Zero());
    std::vector<int> count(P.size(), 0);
    for (const auto& e : mesh.topology().edges) {
        sum[e[0]] += P[e[1]];
        sum[e[1]] += P[e[0]];
        ++count[e[0]];
        ++count[e[1]];
    }
    std::vector<Vec3> out(P);
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (count[i] == 0) continue;
        Vec3 u = sum[i] / count[i] - P[i];
        u -= u.dot(normals[i]) * normals[i];
        out[i] += strength * u;
    }
    return mesh.with_positions(std::move(out));
}

namespace {

void maybe_smooth(OptState& state, const Schedule& schedule)
{
    if (!schedule.tangential_smoothing || state.iter % schedule.smoothing_every != 0) return;
    const double A = state.params.target_area;
    TriMesh relaxed = tangential_relax(state.mesh, schedule.smoothing_strength);
    if (!faces_preserved(state.mesh, relaxed, 1e-14 * A)) return;
    relaxed = rescale_to_area(relaxed, A);
    const double energy = total_energy(relaxed, state.params);
    if (!(energy <= state.energy * (1.0 + schedule.smoothing_tolerance))) return;
    state.mesh = std::move(relaxed);
    state.energy = energy;
    state.energy_history.back() = energy;
}

bool stationary(const OptState& state, const Schedule& schedule)
{
    const auto& hist = state.energy_history;
    const auto window = static_cast<std::size_t>(schedule.stationary_window);
    if (hist.size() <= window) return false;
    const double old = hist[hist.size() - 1 - window];
    return old - hist.back() <= schedule.energy_rtol * std::abs(hist.back());
}

MetricsRow row_for(const OptState& state, const FlowField& flow)
{
    return {state.stage,   state.iter,      flow.energy, flow.h, flow.lambda, flow.grad_norm,
            flow.linf_times_sqrt_area};
}

} // namespace

RunResult continuation_run(const TriMesh& initial, const EnergyParams& base,
                           const Schedule& schedule, const RunObserver& observer,
                           const RunOptions& options)
{
    schedule.check();
    check_params(base);
    require_valid(initial);
    const double A = base.target_area;

    RunResult result;
    TriMesh mesh = rescale_to_area(initial, A);
    {
        const auto le = low_energy_check(mesh, base);
        result.initial_low_energy_ok = le.ok;
        result.initial_low_energy_value = le.value;
    }

    for (std::size_t k = 0; k < schedule.p_list.size(); ++k) {
        OptState state;
        state.mesh = mesh;
        state.params = base;
        state.params.p = schedule.p_list[k];
        state.params.epsilon = schedule.epsilon_for(state.params.p, A);
        state.stage = static_cast<int>(k);

        try {
            while (!state.termination) {
                const FlowField flow = flow_field(state.mesh, state.params);
                const MetricsRow row = row_for(state, flow);
                result.history.push_back(row);
                if (observer.on_row) observer.on_row(row);
                if (state.iter >= schedule.max_iters_per_stage) {
                    state.termination = StageReason::MaxIterations;
                    break;
                }
                flow_step(state, schedule, flow);
                if (state.termination) break;
                maybe_smooth(state, schedule);
                if (stationary(state, schedule)) state.termination = StageReason::Stationary;
            }
            if (state.termination == StageReason::Stalled || state.termination == StageReason::Stationary ||
                state.termination == StageReason::Converged) {
                // Log the final state of the stage as well.
                const FlowField flow = flow_field(state.mesh, state.params);
                const MetricsRow row = row_for(state, flow);
                if (result.history.empty() || result.history.back().iter != row.iter ||
                    result.history.back().stage != row.stage) {
                    result.history.push_back(row);
                    if (observer.on_row) observer.on_row(row);
                }
            }
        } catch (const std::exception& e) {
            result.status = RunStatus::Aborted;
            result.message = std::string("stage ") + std::to_string(k) + " aborted: " + e.what();
            result.mesh = state.mesh;
            return result;
        }

        mesh = state.mesh;
        const auto sample = sample_surface(mesh, state.params);
        ELReport report = three_value_report(sample, state.params, options.three_value);
        StageSummary s;
        s.p = state.params.p;
        s.epsilon = state.params.epsilon;
        s.iterations = state.iter;
        s.reason = *state.termination;
        s.energy = total_energy(sample, state.params);
        s.h = report.h;
        s.h_power_mean = normalized_power_mean(sample.weighted_curvature(), sample.fields.measure,
                                               0.0, state.params.p, A);
        s.lambda = report.lambda;
        s.low_energy_value = low_energy_check(sample, state.params).value;
        s.residual_l2 = report.residual_l2;
        s.alignment_residual = report.alignment_residual;
        s.concentration = report.concentration;
        s.max_abs_w = report.w.cwiseAbs().maxCoeff();
        result.stages.push_back(s);
        result.reports.push_back(std::move(report));
        result.low_energy_trace.push_back(s.low_energy_value);
        if (observer.on_stage_end) observer.on_stage_end(state.stage, mesh);
    }

    result.mesh = mesh;
    result.status = result.stages.back().reason == StageReason::Stalled ? RunStatus::Stalled
                                                                         : RunStatus::Converged;
    return result;
}

double sphericity(const TriMesh& mesh)
{
    const Vec3 c = area_centroid(mesh);
    const auto& P = mesh.positions();
    double mean = 0.0;
    for (const auto& p : P) mean += (p - c).norm();
    mean /= static_cast<double>(P.size());
    double var = 0.0;
    for (const auto& p : P) var += std::pow((p - c).norm() - mean, 2);
    var /= static_cast<double>(P.size());
    return std::sqrt(var) / mean;
}

double hausdorff_distance(const TriMesh& a, const TriMesh& b)
{
    const ReferenceSurface ra(a);
    const ReferenceSurface rb(b);
    double d = 0.0;
    for (const auto& p : a.positions()) d = std::max(d, rb.distance(p).distance);
    for (const auto& p : b.positions()) d = std::max(d, ra.distance(p).distance);
    return d;
}

} // namespace infw
