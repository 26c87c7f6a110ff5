#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "infw/el_verifier.hpp"

#include <numbers>

using namespace infw;

namespace {

constexpr double kPi = std::numbers::pi;

EnergyParams sphere_params(double p, double epsilon = 0.0)
{
    EnergyParams params;
    params.p = p;
    params.epsilon = epsilon;
    params.target_area = 4.0 * kPi;
    return params;
}

TriMesh round_mesh()
{
    return rescale_to_area(build_icosphere(3, 1.0), 4.0 * kPi);
}

TriMesh noisy_mesh()
{
    return rescale_to_area(perturb_radial(build_icosphere(3, 1.0), 0.05, 7), 4.0 * kPi);
}

} // namespace

TEST_CASE("w on a round sphere is one")
{
    const auto w = compute_w(round_mesh(), sphere_params(4.0));
    CHECK((w.array() - 1.0).abs().maxCoeff() <= 0.08);
}

TEST_CASE("w is self-normalizing for constant curvature")
{
    const auto m = round_mesh();
    for (double p : {2.0, 5.0, 64.0, 300.0}) {
        const auto params = sphere_params(p);
        auto sample = sample_surface(m, params);
        sample.fields.H.setConstant(0.7);
        const double h = lp_energy(sample, params);
        CHECK(h == doctest::Approx(0.7 * std::pow(total_area(m) / params.target_area, 1.0 / p)).epsilon(1e-12));
        const auto w = compute_w(sample, params, 0.7);
        CHECK((w.array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("w has the sign of H")
{
    const auto m = perturb_radial(build_icosphere(3, 1.0), 0.3, 5);
    for (double eps : {0.0, 1e-3}) {
        EnergyParams params = sphere_params(6.0, eps);
        params.target_area = total_area(m);
        params.weight = RadialQuadraticWeight{Vec3(0.4, 0, 0), 0.5};
        const auto sample = sample_surface(m, params);
        const auto w = compute_w(sample, params, lp_energy(sample, params));
        const auto& H = sample.fields.H;
        REQUIRE(H.minCoeff() < 0.0);
        for (Eigen::Index i = 0; i < H.size(); ++i) {
            if (H[i] > 0.0) CHECK(w[i] > 0.0);
            if (H[i] < 0.0) CHECK(w[i] < 0.0);
        }
    }
}

TEST_CASE("w is continuous at eps = 0")
{
    const auto m = noisy_mesh();
    const auto w0 = compute_w(m, sphere_params(8.0, 0.0));
    const auto w1 = compute_w(m, sphere_params(8.0, 1e-14));
    CHECK((w1 - w0).norm() <= 1e-10 * w0.norm());
}

TEST_CASE("w needs a nonzero h")
{
    const auto m = round_mesh();
    const auto params = sphere_params(4.0);
    const auto sample = sample_surface(m, params);
    CHECK_THROWS_AS(compute_w(sample, params, 0.0), EnergyError);
}

TEST_CASE("potential Q")
{
    const auto m = round_mesh();
    SUBCASE("round sphere at p = 4")
    {
        const auto Q = compute_Q(m, sphere_params(4.0));
        CHECK(Q.minCoeff() >= 0.5 - 0.05);
        CHECK(Q.maxCoeff() <= 0.5 + 0.05);
    }
    SUBCASE("constant weights do not enter")
    {
        EnergyParams a = sphere_params(4.0);
        EnergyParams b = a;
        b.weight = ConstantWeight{3.0};
        CHECK((compute_Q(m, a) - compute_Q(m, b)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("regularized and unregularized branches differ by (2/p) eps / xi^2")
    {
        const auto n = noisy_mesh();
        EnergyParams a = sphere_params(6.0, 0.0);
        a.weight = RadialQuadraticWeight{Vec3(0.5, 0, 0), 0.25};
        EnergyParams b = a;
        b.epsilon = 0.03;
        const auto sample = sample_surface(n, a);
        const VertexField diff = compute_Q(sample, a) - compute_Q(sample, b);
        for (Eigen::Index i = 0; i < diff.size(); ++i)
            CHECK(diff[i] == doctest::Approx(2.0 / 6.0 * 0.03 / (sample.xi[i] * sample.xi[i])).epsilon(1e-9));
    }
}

TEST_CASE("multiplier projection")
{
    const auto m = noisy_mesh();
    const auto f = mean_curvature(m);
    CHECK(project_multiplier(VertexField::Zero(f.H.size()), f.H, f.measure) == 0.0);
    CHECK(project_multiplier(2.5 * f.H, f.H, f.measure) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("Euler-Lagrange residual separates critical from non-critical meshes")
{
    const auto params = sphere_params(4.0);
    const auto round = el_residual(round_mesh(), params);
    CHECK(round.residual_l2 <= 0.05);
    CHECK(round.lambda == doctest::Approx(0.5).epsilon(0.05));
    CHECK(round.q_branch == QBranch::Unregularized);

    const auto noisy = el_residual(noisy_mesh(), params);
    CHECK(noisy.residual_l2 > 0.5);

    const auto reg = el_residual(round_mesh(), sphere_params(4.0, 1e-4));
    CHECK(reg.q_branch == QBranch::Regularized);
}

TEST_CASE("residual is not invariant under w -> w + 1")
{
    const auto m = round_mesh();
    const auto params = sphere_params(4.0);
    const auto sample = sample_surface(m, params);
    const auto t = el_terms(sample, params);
    auto residual = [&](const VertexField& w) {
        const VertexField G = 0.5 * sample.lap.apply(w) + t.Q.cwiseProduct(w);
        const double lambda = project_multiplier(G, sample.fields.H, sample.fields.measure);
        const VertexField e = G - lambda * sample.fields.H;
        const VertexField qw = t.Q.cwiseProduct(w);
        return std::sqrt(e.cwiseProduct(e).cwiseProduct(sample.fields.measure).sum() /
                         qw.cwiseProduct(qw).cwiseProduct(sample.fields.measure).sum());
    };
    const double base = residual(t.w);
    CHECK(base == doctest::Approx(el_residual(sample, params).residual_l2).epsilon(1e-12));
    const VertexField shifted = t.w.array() + 1.0;
    // On the sphere w + 1 is still (nearly) a multiple of H, so the residual
    // stays small; a random perturbation of w must raise it.
    VertexField bumped = t.w;
    for (Eigen::Index i = 0; i < bumped.size(); i += 3) bumped[i] += 1.0;
    CHECK(residual(shifted) != base);
    CHECK(residual(bumped) > 10.0 * base);
}

TEST_CASE("three-value classification on a round sphere")
{
    const auto m = round_mesh();
    for (double p : {16.0, 64.0}) {
        const auto r = three_value_report(m, sphere_params(p));
        CHECK(r.count_plus == static_cast<int>(m.num_vertices()));
        CHECK(r.count_zero == 0);
        CHECK(r.count_minus == 0);
        CHECK(r.concentration == 1.0);
        CHECK(r.alignment_residual <= 0.02);
        CHECK(r.tau == 0.05);
        CHECK(r.delta_c == 0.10);
    }
}

TEST_CASE("classes partition the vertices and are symmetric for an odd field")
{
    // Field odd under the mirror x -> -x of the icosphere.
    const auto m = round_mesh();
    const auto params = sphere_params(8.0);
    const auto sample = sample_surface(m, params);
    ELReport report;
    report.h = 1.0;
    report.w.resize(static_cast<Eigen::Index>(m.num_vertices()));
    for (std::size_t i = 0; i < m.num_vertices(); ++i)
        report.w[static_cast<Eigen::Index>(i)] = m.positions()[i].x();
    const ThreeValueOptions options{0.05, 0.10};
    classify(report, sample, options);
    CHECK(report.count_plus == report.count_minus);
    CHECK(report.count_plus + report.count_zero + report.count_minus == static_cast<int>(m.num_vertices()));
    CHECK(report.count_zero > 0);
    const double wmax = report.w.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
        const double x = m.positions()[i].x();
        const auto c = report.three_value[i];
        if (c == VertexClass::Zero) CHECK(std::abs(x) <= 0.05 * wmax);
        if (c == VertexClass::Plus) CHECK(x > 0.05 * wmax);
        if (c == VertexClass::Minus) CHECK(x < -0.05 * wmax);
    }
}

TEST_CASE("holder curve")
{
    const auto m = round_mesh();
    EnergyParams params = sphere_params(2.0);
    SUBCASE("requires the target area")
    {
        EnergyParams wrong = params;
        wrong.target_area = 5.0;
        CHECK_THROWS_AS(holder_curve(m, wrong, {2, 4}), EnergyError);
    }
    SUBCASE("constant field gives a flat curve")
    {
        const auto a = vertex_measure(m);
        const VertexField c = VertexField::Constant(a.size(), 1.7);
        for (double p : {2.0, 16.0, 512.0})
            CHECK(normalized_power_mean(c, a, 0.0, p, a.sum()) == doctest::Approx(1.7).epsilon(1e-13));
    }
    SUBCASE("nondecreasing on a generic mesh")
    {
        const auto n = noisy_mesh();
        params.weight = RadialQuadraticWeight{Vec3(0.5, 0, 0), 0.25};
        const auto curve = holder_curve(n, params, {2, 4, 8, 16, 32, 64, 128, 256, 512});
        for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].second > curve[k - 1].second);
    }
}

TEST_CASE("report JSON round trip")
{
    EnergyParams params = sphere_params(8.0, 1e-4);
    params.weight = RadialQuadraticWeight{Vec3(0.5, 0, 0), 0.25};
    const auto r = three_value_report(noisy_mesh(), params);
    const auto j = to_json(r);
    const auto back = report_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
    CHECK(back.three_value == r.three_value);
    CHECK(back.q_branch == QBranch::Regularized);
    CHECK((back.w - r.w).norm() == 0.0);

    ELReport odd = r;
    odd.residual_l2 = std::numeric_limits<double>::infinity();
    const auto jo = nlohmann::json::parse(to_json(odd).dump());
    CHECK(std::isinf(report_from_json(jo).residual_l2));

    CHECK(to_string(VertexClass::Minus) == "MINUS");
    CHECK(vertex_class_from_string("PLUS") == VertexClass::Plus);
    CHECK_THROWS(vertex_class_from_string("plus"));
}
