#include "infw/diffgeo.hpp"

#include <cmath>
#include <numbers>

namespace infw {

namespace {

double corner_angle(const Vec3& apex, const Vec3& b, const Vec3& c)
{
    Vec3 u = b - apex;
    Vec3 w = c - apex;
    return std::atan2(u.cross(w).norm(), u.dot(w));
}

} // namespace

VertexField LaplacianOperator::apply(const VertexField& u) const
{
    return (stiffness * u).cwiseQuotient(mass);
}

std::vector<Vec3> LaplacianOperator::apply(const std::vector<Vec3>& u) const
{
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixX3d U(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) U.row(i) = u[i].transpose();
    Eigen::MatrixX3d LU = stiffness * U;
    std::vector<Vec3> out(u.size());
    for (Eigen::Index i = 0; i < n; ++i) out[i] = LU.row(i).transpose() / mass[i];
    return out;
}

LaplacianOperator cotan_laplacian(const TriMesh& mesh)
{
    const auto& P = mesh.positions();
    const auto nv = static_cast<Eigen::Index>(mesh.num_vertices());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(12 * mesh.num_faces());
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangles()[f];
        const double twice_area = (P[t[1]] - P[t[0]]).cross(P[t[2]] - P[t[0]]).norm();
        if (is_degenerate_triangle(P[t[0]], P[t[1]], P[t[2]]))
            throw MeshError("cotan_laplacian: degenerate triangle " + std::to_string(f));
        for (int k = 0; k < 3; ++k) {
            // Corner k is opposite the edge (i, j).
            const int i = t[(k + 1) % 3];
            const int j = t[(k + 2) % 3];
            const double cot = (P[i] - P[t[k]]).dot(P[j] - P[t[k]]) / twice_area;
            const double w = 0.5 * cot;
            triplets.emplace_back(i, j, w);
            triplets.emplace_back(j, i, w);
            triplets.emplace_back(i, i, -w);
            triplets.emplace_back(j, j, -w);
        }
    }
    LaplacianOperator op;
    op.stiffness.resize(nv, nv);
    op.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    op.mass = vertex_measure(mesh);
    return op;
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh)
{
    const auto& P = mesh.positions();
    std::vector<Vec3> n(mesh.num_vertices(), Vec3::Zero());
    for (const auto& t : mesh.triangles()) {
        Vec3 fn = (P[t[1]] - P[t[0]]).cross(P[t[2]] - P[t[0]]);
        const double len = fn.norm();
        if (!(len > 0.0)) continue;
        fn /= len;
        for (int k = 0; k < 3; ++k) {
            const double angle = corner_angle(P[t[k]], P[t[(k + 1) % 3]], P[t[(k + 2) % 3]]);
            n[t[k]] += angle * fn;
        }
    }
    for (auto& v : n) {
        const double len = v.norm();
        if (len > 0.0) v /= len;
    }
    return n;
}

SurfaceFields mean_curvature(const TriMesh& mesh)
{
    return mean_curvature(mesh, cotan_laplacian(mesh));
}

SurfaceFields mean_curvature(const TriMesh& mesh, const LaplacianOperator& lap)
{
    SurfaceFields out;
    out.normal = vertex_normals(mesh);
    out.measure = lap.mass;
    const auto lf = lap.apply(mesh.positions());
    out.H.resize(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t i = 0; i < lf.size(); ++i) out.H[i] = -0.5 * lf[i].dot(out.normal[i]);
    return out;
}

VertexField gauss_curvature(const TriMesh& mesh)
{
    const auto& P = mesh.positions();
    VertexField defect = VertexField::Constant(static_cast<Eigen::Index>(mesh.num_vertices()),
                                               2.0 * std::numbers::pi);
    for (const auto& t : mesh.triangles()) {
        for (int k = 0; k < 3; ++k)
            defect[t[k]] -= corner_angle(P[t[k]], P[t[(k + 1) % 3]], P[t[(k + 2) % 3]]);
    }
    return defect.cwiseQuotient(vertex_measure(mesh));
}

SurfaceFields surface_fields(const TriMesh& mesh, const LaplacianOperator& lap)
{
    SurfaceFields out = mean_curvature(mesh, lap);
    out.K = gauss_curvature(mesh);
    return out;
}

double willmore_energy(const TriMesh& mesh)
{
    const auto fields = mean_curvature(mesh);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < fields.H.size(); ++i)
        sum += fields.H[i] * fields.H[i] * fields.measure[i];
    return sum;
}

} // namespace infw
