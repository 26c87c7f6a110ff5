#pragma once

#include "infw/mesh.hpp"

#include <memory>
#include <string>
#include <variant>

namespace infw {

/// xi(x) = value (value >= 1).
struct ConstantWeight {
    double value = 1.0;
};

/// xi(x) = 1 + c |x - center|^2.
struct RadialQuadraticWeight {
    Vec3 center = Vec3::Zero();
    double c = 1.0;
};

/// xi(x) = 1 + c <axis, x>^2. Does not grow along the plane orthogonal to
/// `axis`, so it only makes sense together with a penalisation term.
struct AxisQuadraticWeight {
    Vec3 axis = Vec3::UnitZ();
    double c = 1.0;
};

using WeightSpec = std::variant<ConstantWeight, RadialQuadraticWeight, AxisQuadraticWeight>;

struct WeightValue {
    double value;
    Vec3 gradient;
};

/// Throws std::invalid_argument if the parameters violate xi >= 1 or c > 0.
void check_weight(const WeightSpec& spec);

/// True when xi grows without bound in every direction.
bool is_coercive(const WeightSpec& spec);

bool is_constant(const WeightSpec& spec);

std::string weight_name(const WeightSpec& spec);

WeightValue weight_eval(const WeightSpec& spec, const Vec3& x);

/// Per-vertex <grad xi(f_i), nu_i> with the outward angle-weighted normals.
VertexField normal_weight_derivative(const TriMesh& mesh, const WeightSpec& spec);
VertexField normal_weight_derivative(const TriMesh& mesh, const std::vector<Vec3>& normals,
                                     const WeightSpec& spec);

struct DistanceValue {
    double distance;
    Vec3 gradient;       // (x - closest) / distance, zero on the surface
    Vec3 closest;
    int triangle;        // lowest index among equidistant triangles
};

/// Closest point on triangle (a, b, c) to x.
Vec3 closest_point_on_triangle(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);

/// Reference immersion f0 with an AABB tree for exact unsigned distance queries.
class ReferenceSurface {
public:
    explicit ReferenceSurface(TriMesh mesh);

    const TriMesh& mesh() const { return mesh_; }

    DistanceValue distance(const Vec3& x) const;
    /// Linear scan over all triangles; same result as distance().
    DistanceValue distance_brute_force(const Vec3& x) const;

private:
    struct Node {
        Eigen::AlignedBox3d box;
        int left = -1;   // child node indices, -1 for leaves
        int right = -1;
        int begin = 0;   // range into order_ for leaves
        int end = 0;
    };

    int build(int begin, int end, std::vector<Vec3>& centroids);
    void candidate(const Vec3& x, int tri, DistanceValue& best, double& best_sq) const;

    TriMesh mesh_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

DistanceValue distance_eval(const ReferenceSurface& ref, const Vec3& x);

} // namespace infw
