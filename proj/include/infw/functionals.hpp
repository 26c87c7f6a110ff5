#pragma once

#include "infw/diffgeo.hpp"
#include "infw/weights.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace infw {

inline constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

/// sqrt(8 pi): the low-energy threshold for ||xi H||_inf * sqrt(A).
inline const double kLowEnergyThreshold = std::sqrt(8.0 * std::numbers::pi);

class EnergyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnergyParams {
    double p = 2.0;                 // in [2, inf); kInfiniteP selects the sup norm
    double epsilon = 0.0;
    double sigma = 0.0;
    double target_area = 4.0 * std::numbers::pi;
    WeightSpec weight = ConstantWeight{};
    std::shared_ptr<const ReferenceSurface> reference;  // required iff sigma > 0

    bool p_is_infinite() const { return std::isinf(p); }
};

/// Throws EnergyError when the parameter record is inconsistent.
void check_params(const EnergyParams& params);

/// Everything the energies and Euler-Lagrange terms need, evaluated once per
/// mesh. Distance fields are filled only when sigma > 0.
struct SurfaceSample {
    LaplacianOperator lap;
    SurfaceFields fields;
    VertexField xi;
    VertexField xi_normal;   // <grad xi, nu> with outward nu
    VertexField dist;        // d(f_i), zero without penalisation
    VertexField dist_normal; // <grad d, nu> with outward nu

    VertexField weighted_curvature() const { return xi.cwiseProduct(fields.H); }
    Eigen::Index size() const { return fields.H.size(); }
};

SurfaceSample sample_surface(const TriMesh& mesh, const EnergyParams& params);

/// h_{p,eps} = A^{-1/p} (sum_i ((xi H)_i^2 + eps)^{p/2} a_i)^{1/p}, evaluated
/// with the largest term factored out so that large p does not overflow.
double lp_energy(const TriMesh& mesh, const EnergyParams& params);
double lp_energy(const SurfaceSample& sample, const EnergyParams& params);

/// The same normalized power mean for an arbitrary field.
double normalized_power_mean(const VertexField& values, const VertexField& measure, double epsilon,
                             double p, double target_area);

struct LinfValue {
    double value;
    int vertex;  // lowest index attaining the max
};

LinfValue linf_energy(const TriMesh& mesh, const EnergyParams& params);
LinfValue linf_energy(const SurfaceSample& sample);

/// (sigma / 2A) sum_i d(f_i)^2 a_i.
double penalisation(const TriMesh& mesh, const EnergyParams& params);
double penalisation(const SurfaceSample& sample, const EnergyParams& params);

/// lp_energy (or linf_energy for p = inf) plus penalisation.
double total_energy(const TriMesh& mesh, const EnergyParams& params);
double total_energy(const SurfaceSample& sample, const EnergyParams& params);

struct LowEnergyCheck {
    bool ok;
    double value;  // ||xi H||_inf * sqrt(A)
};

LowEnergyCheck low_energy_check(const TriMesh& mesh, const EnergyParams& params);
LowEnergyCheck low_energy_check(const SurfaceSample& sample, const EnergyParams& params);

} // namespace infw
