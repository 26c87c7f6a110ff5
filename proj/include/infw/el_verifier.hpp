#pragma once

#include "infw/functionals.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace infw {

enum class VertexClass { Plus, Zero, Minus };

std::string to_string(VertexClass c);
VertexClass vertex_class_from_string(const std::string& s);

/// Which form of the potential Q was used: the eps = 0 form or the
/// eps-regularized one.
enum class QBranch { Unregularized, Regularized };

/// Discrete Euler-Lagrange terms of the normalized L^p energy plus
/// penalisation, in outward-normal conventions:
///   G = 1/2 Lap w + Q w - sigma (d <grad d, nu> + d^2 H),
/// and the first variation along phi nu is -(1/A) sum_i G_i phi_i a_i.
/// Critical points satisfy G = lambda H.
struct ELTerms {
    double h = 0.0;
    VertexField w;
    VertexField Q;
    VertexField G;
    double lambda = 0.0;
    QBranch branch = QBranch::Unregularized;
};

/// w = h^{1-p} ((xi H)^2 + eps)^{(p-2)/2} xi^2 H, which for eps = 0 is
/// h^{1-p} xi^p |H|^{p-2} H. Evaluated relative to h so large p stays finite.
VertexField compute_w(const TriMesh& mesh, const EnergyParams& params);
VertexField compute_w(const SurfaceSample& sample, const EnergyParams& params, double h);

/// eps = 0:  Q = 2 (p-1)/p H^2 - K - H <grad xi, nu> / xi
/// eps > 0:  Q = 2 H^2 - K - (2/p)(H^2 + eps / xi^2) - H <grad xi, nu> / xi
/// (nu outward; the directional-derivative term changes sign with the normal).
VertexField compute_Q(const TriMesh& mesh, const EnergyParams& params);
VertexField compute_Q(const SurfaceSample& sample, const EnergyParams& params);

/// L^2(mu) projection sum G H a / sum H^2 a.
double project_multiplier(const VertexField& G, const VertexField& H, const VertexField& measure);

ELTerms el_terms(const SurfaceSample& sample, const EnergyParams& params);

struct ELReport {
    double p = 0.0;
    double epsilon = 0.0;
    double sigma = 0.0;
    double h = 0.0;
    double lambda = 0.0;
    VertexField w;
    VertexField Q;
    double residual_l2 = 0.0;
    QBranch q_branch = QBranch::Unregularized;

    // Filled by three_value_report.
    double tau = 0.0;
    double delta_c = 0.0;
    std::vector<VertexClass> three_value;
    int count_plus = 0;
    int count_zero = 0;
    int count_minus = 0;
    double concentration = 0.0;
    double alignment_residual = 0.0;
};

/// Residual of 1/2 Lap w + Q w = lambda H - sigma d D_nu d + sigma d^2 H in
/// L^2(mu), relative to ||Q w||.
ELReport el_residual(const TriMesh& mesh, const EnergyParams& params);
ELReport el_residual(const SurfaceSample& sample, const EnergyParams& params);

struct ThreeValueOptions {
    double tau = 0.05;      // nodal band |w| <= tau max|w|
    double delta_c = 0.10;  // |xi H - h sgn w| <= delta_c h counts as concentrated
};

ELReport three_value_report(const TriMesh& mesh, const EnergyParams& params,
                            const ThreeValueOptions& options = {});
ELReport three_value_report(const SurfaceSample& sample, const EnergyParams& params,
                            const ThreeValueOptions& options = {});

/// Fills the classification fields of an existing report from its w and h.
void classify(ELReport& report, const SurfaceSample& sample, const ThreeValueOptions& options);

/// (p, h_p) for each p; the mesh must already have area A.
std::vector<std::pair<double, double>> holder_curve(const TriMesh& mesh, const EnergyParams& params,
                                                    const std::vector<double>& p_list);

nlohmann::json to_json(const ELReport& report);
ELReport report_from_json(const nlohmann::json& j);

} // namespace infw
