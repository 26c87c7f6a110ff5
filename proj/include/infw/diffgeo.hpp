#pragma once

#include "infw/mesh.hpp"

#include <Eigen/SparseCore>

namespace infw {

/// Cotangent Laplace-Beltrami operator in weak form together with the lumped
/// mass. `stiffness` is symmetric with zero row sums and negative
/// semi-definite, so apply() approximates the smooth div grad and the round
/// sphere satisfies apply(f) = -2 H nu with outward nu.
struct LaplacianOperator {
    Eigen::SparseMatrix<double> stiffness;
    VertexField mass;

    /// Integrated Laplacian (stiffness * u), units of u.
    VertexField apply_weak(const VertexField& u) const { return stiffness * u; }
    /// Pointwise Laplacian (stiffness * u) / mass.
    VertexField apply(const VertexField& u) const;
    /// Pointwise Laplacian of each coordinate of a vector field.
    std::vector<Vec3> apply(const std::vector<Vec3>& u) const;
};

/// Per-vertex curvature data. Normals point outward for counterclockwise
/// (outward-oriented) triangles; H > 0 on convex spheres.
struct SurfaceFields {
    VertexField H;
    VertexField K;
    std::vector<Vec3> normal;
    VertexField measure;
};

LaplacianOperator cotan_laplacian(const TriMesh& mesh);

/// Normalized angle-weighted average of incident face normals.
std::vector<Vec3> vertex_normals(const TriMesh& mesh);

/// H_i = -<(L f)_i / (2 a_i), nu_i>. Fills H, normal and measure.
SurfaceFields mean_curvature(const TriMesh& mesh);
SurfaceFields mean_curvature(const TriMesh& mesh, const LaplacianOperator& lap);

/// Angle-defect Gauss curvature (2 pi - sum of incident angles) / a_i.
VertexField gauss_curvature(const TriMesh& mesh);

/// H, K, normals and measure in one pass.
SurfaceFields surface_fields(const TriMesh& mesh, const LaplacianOperator& lap);

/// Discrete integral of H^2 with the lumped measure.
double willmore_energy(const TriMesh& mesh);

} // namespace infw
