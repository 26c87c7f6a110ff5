#include "infw/functionals.hpp"

#include "infw/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace infw {

void check_params(const EnergyParams& params)
{
    if (!(params.p >= 2.0)) throw EnergyError("p must be >= 2 (or inf)");
    if (!(params.epsilon >= 0.0)) throw EnergyError("epsilon must be >= 0");
    if (!(params.sigma >= 0.0)) throw EnergyError("sigma must be >= 0");
    if (!(params.target_area > 0.0) || std::isinf(params.target_area))
        throw EnergyError("target area must be positive and finite");
    if (params.sigma > 0.0 && !params.reference)
        throw EnergyError("reference required when sigma > 0");
    try {
        check_weight(params.weight);
    } catch (const std::invalid_argument& e) {
        throw EnergyError(e.what());
    }
}

SurfaceSample sample_surface(const TriMesh& mesh, const EnergyParams& params)
{
    SurfaceSample s;
    s.lap = cotan_laplacian(mesh);
    s.fields = surface_fields(mesh, s.lap);
    const auto& P = mesh.positions();
    const auto n = static_cast<Eigen::Index>(P.size());
    s.xi.resize(n);
    s.xi_normal.resize(n);
    s.dist = VertexField::Zero(n);
    s.dist_normal = VertexField::Zero(n);
    const bool penalised = params.sigma > 0.0;
    if (penalised && !params.reference) throw EnergyError("reference required when sigma > 0");
    parallel_for(P.size(), [&](std::size_t i) {
        const auto w = weight_eval(params.weight, P[i]);
        s.xi[i] = w.value;
        s.xi_normal[i] = w.gradient.dot(s.fields.normal[i]);
        if (penalised) {
            const auto d = params.reference->distance(P[i]);
            s.dist[i] = d.distance;
            s.dist_normal[i] = d.gradient.dot(s.fields.normal[i]);
        }
    });
    return s;
}

double normalized_power_mean(const VertexField& values, const VertexField& measure, double epsilon,
                             double p, double target_area)
{
    if (!(p >= 1.0) || std::isinf(p)) throw EnergyError("normalized_power_mean: p must be finite");
    double peak = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double x = values[i] * values[i] + epsilon;
        if (!std::isfinite(x))
            throw EnergyError("non-finite weighted curvature at vertex " + std::to_string(i));
        peak = std::max(peak, x);
    }
    if (peak == 0.0) return 0.0;
    // sum_i (x_i / peak)^{p/2} a_i in fixed vertex order.
    double scaled = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double x = values[i] * values[i] + epsilon;
        scaled += std::exp(0.5 * p * std::log(x / peak)) * measure[i];
    }
    const double h = std::sqrt(peak) * std::exp(std::log(scaled / target_area) / p);
    if (!std::isfinite(h)) throw EnergyError("lp_energy overflow at p = " + std::to_string(p));
    return h;
}

double lp_energy(const TriMesh& mesh, const EnergyParams& params)
{
    return lp_energy(sample_surface(mesh, params), params);
}

double lp_energy(const SurfaceSample& sample, const EnergyParams& params)
{
    if (params.p_is_infinite()) throw EnergyError("lp_energy requires finite p");
    return normalized_power_mean(sample.weighted_curvature(), sample.fields.measure, params.epsilon,
                                 params.p, params.target_area);
}

LinfValue linf_energy(const TriMesh& mesh, const EnergyParams& params)
{
    return linf_energy(sample_surface(mesh, params));
}

LinfValue linf_energy(const SurfaceSample& sample)
{
    LinfValue out{0.0, 0};
    const VertexField xh = sample.weighted_curvature();
    for (Eigen::Index i = 0; i < xh.size(); ++i) {
        if (std::abs(xh[i]) > out.value) {
            out.value = std::abs(xh[i]);
            out.vertex = static_cast<int>(i);
        }
    }
    return out;
}

double penalisation(const TriMesh& mesh, const EnergyParams& params)
{
    if (params.sigma == 0.0) return 0.0;
    return penalisation(sample_surface(mesh, params), params);
}

double penalisation(const SurfaceSample& sample, const EnergyParams& params)
{
    if (params.sigma == 0.0) return 0.0;
    if (!params.reference) throw EnergyError("reference required when sigma > 0");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sample.size(); ++i)
        sum += sample.dist[i] * sample.dist[i] * sample.fields.measure[i];
    return params.sigma / (2.0 * params.target_area) * sum;
}

double total_energy(const TriMesh& mesh, const EnergyParams& params)
{
    return total_energy(sample_surface(mesh, params), params);
}

double total_energy(const SurfaceSample& sample, const EnergyParams& params)
{
    const double curvature =
        params.p_is_infinite() ? linf_energy(sample).value : lp_energy(sample, params);
    return curvature + penalisation(sample, params);
}

LowEnergyCheck low_energy_check(const TriMesh& mesh, const EnergyParams& params)
{
    return low_energy_check(sample_surface(mesh, params), params);
}

LowEnergyCheck low_energy_check(const SurfaceSample& sample, const EnergyParams& params)
{
    const double value = linf_energy(sample).value * std::sqrt(params.target_area);
    return {value < kLowEnergyThreshold, value};
}

} // namespace infw
