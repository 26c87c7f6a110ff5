#include "infw/el_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace infw {

std::string to_string(VertexClass c)
{
    switch (c) {
    case VertexClass::Plus: return "PLUS";
    case VertexClass::Zero: return "ZERO";
    case VertexClass::Minus: return "MINUS";
    }
    return "ZERO";
}

VertexClass vertex_class_from_string(const std::string& s)
{
    if (s == "PLUS") return VertexClass::Plus;
    if (s == "ZERO") return VertexClass::Zero;
    if (s == "MINUS") return VertexClass::Minus;
    throw std::invalid_argument("unknown vertex class '" + s + "'");
}

VertexField compute_w(const TriMesh& mesh, const EnergyParams& params)
{
    const auto sample = sample_surface(mesh, params);
    return compute_w(sample, params, lp_energy(sample, params));
}

VertexField compute_w(const SurfaceSample& sample, const EnergyParams& params, double h)
{
    if (params.p_is_infinite()) throw EnergyError("compute_w requires finite p");
    if (!(h > 0.0)) throw EnergyError("compute_w: h = 0 (weighted curvature vanishes identically)");
    const double p = params.p;
    const auto& H = sample.fields.H;
    VertexField w(H.size());
    for (Eigen::Index i = 0; i < H.size(); ++i) {
        const double xi = sample.xi[i];
        if (params.epsilon == 0.0) {
            const double ratio = std::abs(xi * H[i]) / h;
            w[i] = ratio == 0.0 ? 0.0
                                : std::copysign(xi * std::exp((p - 1.0) * std::log(ratio)), H[i]);
        } else {
            const double s = xi * xi * H[i] * H[i] + params.epsilon;
            w[i] = xi * xi * H[i] / h * std::exp(0.5 * (p - 2.0) * std::log(s / (h * h)));
        }
        if (!std::isfinite(w[i]))
            throw EnergyError("compute_w: non-finite value at vertex " + std::to_string(i));
    }
    return w;
}

VertexField compute_Q(const TriMesh& mesh, const EnergyParams& params)
{
    return compute_Q(sample_surface(mesh, params), params);
}

VertexField compute_Q(const SurfaceSample& sample, const EnergyParams& params)
{
    if (params.p_is_infinite()) throw EnergyError("compute_Q requires finite p");
    const double p = params.p;
    const auto& H = sample.fields.H;
    const auto& K = sample.fields.K;
    VertexField Q(H.size());
    for (Eigen::Index i = 0; i < H.size(); ++i) {
        const double xi = sample.xi[i];
        const double weight_term = H[i] * sample.xi_normal[i] / xi;
        if (params.epsilon == 0.0)
            Q[i] = 2.0 * (p - 1.0) / p * H[i] * H[i] - K[i] - weight_term;
        else
            Q[i] = 2.0 * H[i] * H[i] - K[i] - 2.0 / p * (H[i] * H[i] + params.epsilon / (xi * xi)) -
                   weight_term;
    }
    return Q;
}

double project_multiplier(const VertexField& G, const VertexField& H, const VertexField& measure)
{
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < H.size(); ++i) {
        num += G[i] * H[i] * measure[i];
        den += H[i] * H[i] * measure[i];
    }
    if (!(den > 0.0)) throw EnergyError("lambda_estimate: integral of H^2 vanishes");
    return num / den;
}

ELTerms el_terms(const SurfaceSample& sample, const EnergyParams& params)
{
    ELTerms t;
    t.h = lp_energy(sample, params);
    t.w = compute_w(sample, params, t.h);
    t.Q = compute_Q(sample, params);
    t.branch = params.epsilon == 0.0 ? QBranch::Unregularized : QBranch::Regularized;
    const auto& H = sample.fields.H;
    t.G = 0.5 * sample.lap.apply(t.w) + t.Q.cwiseProduct(t.w);
    if (params.sigma > 0.0) {
        for (Eigen::Index i = 0; i < H.size(); ++i) {
            const double d = sample.dist[i];
            t.G[i] -= params.sigma * (d * sample.dist_normal[i] + d * d * H[i]);
        }
    }
    for (Eigen::Index i = 0; i < t.G.size(); ++i) {
        if (!std::isfinite(t.G[i]))
            throw EnergyError("Euler-Lagrange density is not finite at vertex " + std::to_string(i));
    }
    t.lambda = project_multiplier(t.G, H, sample.fields.measure);
    return t;
}

ELReport el_residual(const TriMesh& mesh, const EnergyParams& params)
{
    return el_residual(sample_surface(mesh, params), params);
}

ELReport el_residual(const SurfaceSample& sample, const EnergyParams& params)
{
    const ELTerms t = el_terms(sample, params);
    ELReport r;
    r.p = params.p;
    r.epsilon = params.epsilon;
    r.sigma = params.sigma;
    r.h = t.h;
    r.lambda = t.lambda;
    r.w = t.w;
    r.Q = t.Q;
    r.q_branch = t.branch;
    const auto& H = sample.fields.H;
    const auto& a = sample.fields.measure;
    double res = 0.0;
    double ref = 0.0;
    for (Eigen::Index i = 0; i < H.size(); ++i) {
        const double e = t.G[i] - t.lambda * H[i];
        const double qw = t.Q[i] * t.w[i];
        res += e * e * a[i];
        ref += qw * qw * a[i];
    }
    r.residual_l2 = ref > 0.0 ? std::sqrt(res / ref) : std::numeric_limits<double>::infinity();
    return r;
}

void classify(ELReport& report, const SurfaceSample& sample, const ThreeValueOptions& options)
{
    report.tau = options.tau;
    report.delta_c = options.delta_c;
    const auto& w = report.w;
    const auto& a = sample.fields.measure;
    const VertexField xh = sample.weighted_curvature();
    const double h = report.h;
    const double wmax = w.size() > 0 ? w.cwiseAbs().maxCoeff() : 0.0;

    report.three_value.assign(static_cast<std::size_t>(w.size()), VertexClass::Zero);
    report.count_plus = report.count_zero = report.count_minus = 0;
    double active = 0.0;
    double concentrated = 0.0;
    double align_num = 0.0;
    double align_den = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        VertexClass c = VertexClass::Zero;
        if (std::abs(w[i]) > options.tau * wmax) c = w[i] > 0.0 ? VertexClass::Plus : VertexClass::Minus;
        report.three_value[i] = c;
        switch (c) {
        case VertexClass::Plus: ++report.count_plus; break;
        case VertexClass::Minus: ++report.count_minus; break;
        case VertexClass::Zero: ++report.count_zero; break;
        }
        if (c != VertexClass::Zero) {
            const double sgn = w[i] > 0.0 ? 1.0 : -1.0;
            active += a[i];
            if (std::abs(xh[i] - h * sgn) <= options.delta_c * h) concentrated += a[i];
        }
        align_num += std::abs(h * w[i] - std::abs(w[i]) * xh[i]) * a[i];
        align_den += std::abs(w[i]) * a[i];
    }
    report.concentration = active > 0.0 ? concentrated / active : 0.0;
    report.alignment_residual = align_den > 0.0 && h > 0.0 ? align_num / (h * align_den) : 0.0;
}

ELReport three_value_report(const TriMesh& mesh, const EnergyParams& params,
                            const ThreeValueOptions& options)
{
    return three_value_report(sample_surface(mesh, params), params, options);
}

ELReport three_value_report(const SurfaceSample& sample, const EnergyParams& params,
                            const ThreeValueOptions& options)
{
    ELReport r = el_residual(sample, params);
    classify(r, sample, options);
    return r;
}

std::vector<std::pair<double, double>> holder_curve(const TriMesh& mesh, const EnergyParams& params,
                                                    const std::vector<double>& p_list)
{
    const double area = total_area(mesh);
    if (std::abs(area - params.target_area) > 1e-9 * params.target_area)
        throw EnergyError("holder_curve: mesh area differs from the target area");
    const auto sample = sample_surface(mesh, params);
    const VertexField xh = sample.weighted_curvature();
    std::vector<std::pair<double, double>> curve;
    curve.reserve(p_list.size());
    for (double p : p_list)
        curve.emplace_back(p, normalized_power_mean(xh, sample.fields.measure, params.epsilon, p,
                                                    params.target_area));
    return curve;
}

namespace {

nlohmann::json field_to_json(const VertexField& f)
{
    return nlohmann::json(std::vector<double>(f.data(), f.data() + f.size()));
}

// Non-finite values serialize as null; read them back as +inf.
double number(const nlohmann::json& j, const char* key)
{
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

VertexField field_from_json(const nlohmann::json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const VertexField>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

nlohmann::json to_json(const ELReport& r)
{
    nlohmann::json j;
    j["p"] = r.p;
    j["epsilon"] = r.epsilon;
    j["sigma"] = r.sigma;
    j["h"] = r.h;
    j["lambda"] = r.lambda;
    j["residual_l2"] = r.residual_l2;
    j["q_branch"] = r.q_branch == QBranch::Unregularized ? "unregularized" : "regularized";
    j["w"] = field_to_json(r.w);
    j["Q"] = field_to_json(r.Q);
    j["tau"] = r.tau;
    j["delta_c"] = r.delta_c;
    std::vector<std::string> classes;
    classes.reserve(r.three_value.size());
    for (auto c : r.three_value) classes.push_back(to_string(c));
    j["three_value"] = classes;
    j["count_plus"] = r.count_plus;
    j["count_zero"] = r.count_zero;
    j["count_minus"] = r.count_minus;
    j["concentration"] = r.concentration;
    j["alignment_residual"] = r.alignment_residual;
    return j;
}

ELReport report_from_json(const nlohmann::json& j)
{
    ELReport r;
    r.p = number(j, "p");
    r.epsilon = number(j, "epsilon");
    r.sigma = number(j, "sigma");
    r.h = number(j, "h");
    r.lambda = number(j, "lambda");
    r.residual_l2 = number(j, "residual_l2");
    const auto branch = j.at("q_branch").get<std::string>();
    if (branch == "unregularized")
        r.q_branch = QBranch::Unregularized;
    else if (branch == "regularized")
        r.q_branch = QBranch::Regularized;
    else
        throw std::invalid_argument("unknown q_branch '" + branch + "'");
    r.w = field_from_json(j.at("w"));
    r.Q = field_from_json(j.at("Q"));
    r.tau = number(j, "tau");
    r.delta_c = number(j, "delta_c");
    for (const auto& s : j.at("three_value")) r.three_value.push_back(vertex_class_from_string(s));
    r.count_plus = j.at("count_plus").get<int>();
    r.count_zero = j.at("count_zero").get<int>();
    r.count_minus = j.at("count_minus").get<int>();
    r.concentration = number(j, "concentration");
    r.alignment_residual = number(j, "alignment_residual");
    return r;
}

} // namespace infw
