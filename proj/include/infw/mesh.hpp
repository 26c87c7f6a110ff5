#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace infw {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Scalar field with one value per mesh vertex (H, K, w, Q, d, xi o f, ...).
using VertexField = Eigen::VectorXd;

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Connectivity shared by every mesh derived from the same triangle list.
struct Topology {
    std::vector<Triangle> triangles;
    std::size_t num_vertices = 0;

    /// Undirected edges (i < j), sorted lexicographically.
    std::vector<std::array<int, 2>> edges;
    /// Number of directed occurrences (i->j) and (j->i) for each undirected edge.
    std::vector<std::array<int, 2>> edge_direction_counts;

    /// CSR vertex -> incident triangles.
    std::vector<int> vertex_face_offsets;
    std::vector<int> vertex_faces;

    std::size_t num_edges() const { return edges.size(); }
    int euler_characteristic() const
    {
        return static_cast<int>(num_vertices) - static_cast<int>(edges.size()) +
               static_cast<int>(triangles.size());
    }
};

/// Oriented triangle mesh. Positions are the discrete immersion; connectivity
/// is fixed and shared between meshes produced by with_positions().
class TriMesh {
public:
    TriMesh() = default;
    TriMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles);

    const std::vector<Vec3>& positions() const { return positions_; }
    const std::vector<Triangle>& triangles() const { return topology_->triangles; }
    const Topology& topology() const { return *topology_; }

    std::size_t num_vertices() const { return positions_.size(); }
    std::size_t num_faces() const { return topology_->triangles.size(); }
    std::size_t num_edges() const { return topology_->num_edges(); }

    /// Same connectivity, new vertex positions.
    TriMesh with_positions(std::vector<Vec3> positions) const;

    /// Reverses the winding of every triangle (outward normals become inward).
    TriMesh flipped() const;

private:
    std::vector<Vec3> positions_;
    std::shared_ptr<const Topology> topology_;
};

struct ValidationReport {
    bool closed_manifold = false;    // every edge has exactly two incident triangles
    bool consistently_oriented = false;
    bool indices_in_range = false;
    int euler_characteristic = 0;
    double min_triangle_area = 0.0;
    double min_triangle_quality = 0.0;  // 4*sqrt(3)*area / sum(edge^2); 1 for equilateral
    int negative_cotan_weights = 0;     // obtuse-angle warnings, not a failure
    std::vector<std::string> problems;

    bool ok() const { return problems.empty(); }
};

TriMesh build_icosphere(int subdivisions, double radius);

ValidationReport validate(const TriMesh& mesh);

/// Throws MeshError listing the problems if the mesh does not validate.
void require_valid(const TriMesh& mesh);

double triangle_area(const TriMesh& mesh, std::size_t face);

/// True when the triangle's area is at roundoff level relative to its longest
/// edge (collinear or coincident corners).
bool is_degenerate_triangle(const Vec3& a, const Vec3& b, const Vec3& c);
double total_area(const TriMesh& mesh);

/// Mixed Voronoi vertex areas (Voronoi cells, with the barycentric fallback
/// inside obtuse triangles); the discrete surface measure. Sums to the total
/// area exactly.
VertexField vertex_measure(const TriMesh& mesh);

/// Area-weighted centroid of the surface.
Vec3 area_centroid(const TriMesh& mesh);

/// Uniform scaling about the area-weighted centroid so that total area equals
/// target_area.
TriMesh rescale_to_area(const TriMesh& mesh, double target_area);

TriMesh load_obj(const std::filesystem::path& path);
void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

/// Moves every vertex along the ray from the area centroid by a factor
/// (1 + amplitude * u), u uniform in [-1, 1], drawn from a seeded generator.
TriMesh perturb_radial(const TriMesh& mesh, double amplitude, std::uint64_t seed);

/// Applies an affine map x -> diag(scale) * x + offset to every vertex.
TriMesh transformed(const TriMesh& mesh, const Vec3& scale, const Vec3& offset = Vec3::Zero());

} // namespace infw
