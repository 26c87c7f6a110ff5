#include "infw/weights.hpp"

#include "infw/diffgeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace infw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kLeafSize = 4;

} // namespace

void check_weight(const WeightSpec& spec)
{
    std::visit(overloaded{
                   [](const ConstantWeight& w) {
                       if (!(w.value >= 1.0))
                           throw std::invalid_argument("constant weight must be >= 1");
                   },
                   [](const RadialQuadraticWeight& w) {
                       if (!(w.c > 0.0))
                           throw std::invalid_argument("radial_quadratic weight needs c > 0");
                       if (!w.center.allFinite())
                           throw std::invalid_argument("radial_quadratic center must be finite");
                   },
                   [](const AxisQuadraticWeight& w) {
                       if (!(w.c > 0.0))
                           throw std::invalid_argument("axis_quadratic weight needs c > 0");
                       if (!(std::abs(w.axis.norm() - 1.0) < 1e-12))
                           throw std::invalid_argument("axis_quadratic axis must be a unit vector");
                   },
               },
               spec);
}

bool is_coercive(const WeightSpec& spec)
{
    return std::holds_alternative<RadialQuadraticWeight>(spec);
}

bool is_constant(const WeightSpec& spec)
{
    return std::holds_alternative<ConstantWeight>(spec);
}

std::string weight_name(const WeightSpec& spec)
{
    return std::visit(overloaded{
                          [](const ConstantWeight&) { return std::string("constant"); },
                          [](const RadialQuadraticWeight&) { return std::string("radial_quadratic"); },
                          [](const AxisQuadraticWeight&) { return std::string("axis_quadratic"); },
                      },
                      spec);
}

WeightValue weight_eval(const WeightSpec& spec, const Vec3& x)
{
    return std::visit(overloaded{
                          [](const ConstantWeight& w) {
                              return WeightValue{w.value, Vec3::Zero()};
                          },
                          [&x](const RadialQuadraticWeight& w) {
                              const Vec3 r = x - w.center;
                              return WeightValue{1.0 + w.c * r.squaredNorm(), 2.0 * w.c * r};
                          },
                          [&x](const AxisQuadraticWeight& w) {
                              const double s = w.axis.dot(x);
                              return WeightValue{1.0 + w.c * s * s, 2.0 * w.c * s * w.axis};
                          },
                      },
                      spec);
}

VertexField normal_weight_derivative(const TriMesh& mesh, const WeightSpec& spec)
{
    return normal_weight_derivative(mesh, vertex_normals(mesh), spec);
}

VertexField normal_weight_derivative(const TriMesh& mesh, const std::vector<Vec3>& normals,
                                     const WeightSpec& spec)
{
    const auto& P = mesh.positions();
    VertexField out(static_cast<Eigen::Index>(P.size()));
    for (std::size_t i = 0; i < P.size(); ++i)
        out[i] = weight_eval(spec, P[i]).gradient.dot(normals[i]);
    return out;
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c)
{
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = ab.dot(ap);
    const double d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp);
    const double d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp);
    const double d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

ReferenceSurface::ReferenceSurface(TriMesh mesh) : mesh_(std::move(mesh))
{
    require_valid(mesh_);
    const auto& P = mesh_.positions();
    std::vector<Vec3> centroids;
    centroids.reserve(mesh_.num_faces());
    for (const auto& t : mesh_.triangles()) centroids.push_back((P[t[0]] + P[t[1]] + P[t[2]]) / 3.0);
    order_.resize(mesh_.num_faces());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * mesh_.num_faces() / kLeafSize + 1);
    build(0, static_cast<int>(order_.size()), centroids);
}

int ReferenceSurface::build(int begin, int end, std::vector<Vec3>& centroids)
{
    const auto& P = mesh_.positions();
    Node node;
    node.box.setEmpty();
    Eigen::AlignedBox3d centroid_box;
    centroid_box.setEmpty();
    for (int k = begin; k < end; ++k) {
        const auto& t = mesh_.triangles()[order_[k]];
        for (int v : t) node.box.extend(P[v]);
        centroid_box.extend(centroids[order_[k]]);
    }
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) {
        nodes_[index].begin = begin;
        nodes_[index].end = end;
        return index;
    }
    int axis = 0;
    centroid_box.sizes().maxCoeff(&axis);
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         if (centroids[a][axis] != centroids[b][axis])
                             return centroids[a][axis] < centroids[b][axis];
                         return a < b;
                     });
    const int left = build(begin, mid, centroids);
    const int right = build(mid, end, centroids);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

void ReferenceSurface::candidate(const Vec3& x, int tri, DistanceValue& best, double& best_sq) const
{
    const auto& P = mesh_.positions();
    const auto& t = mesh_.triangles()[tri];
    const Vec3 q = closest_point_on_triangle(x, P[t[0]], P[t[1]], P[t[2]]);
    const double d2 = (x - q).squaredNorm();
    if (d2 < best_sq || (d2 == best_sq && tri < best.triangle)) {
        best_sq = d2;
        best.closest = q;
        best.triangle = tri;
    }
}

namespace {

DistanceValue finish(const Vec3& x, DistanceValue best, double best_sq)
{
    best.distance = std::sqrt(best_sq);
    best.gradient = best.distance > 0.0 ? Vec3((x - best.closest) / best.distance) : Vec3::Zero();
    return best;
}

} // namespace

DistanceValue ReferenceSurface::distance(const Vec3& x) const
{
    DistanceValue best{0.0, Vec3::Zero(), Vec3::Zero(), std::numeric_limits<int>::max()};
    double best_sq = std::numeric_limits<double>::infinity();
    // Depth-first, nearer child first; a node is skipped only when its box is
    // strictly farther than the current best so equidistant ties are still seen.
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        const Node& node = nodes_[n];
        if (node.box.squaredExteriorDistance(x) > best_sq) continue;
        if (node.left < 0) {
            for (int k = node.begin; k < node.end; ++k) candidate(x, order_[k], best, best_sq);
            continue;
        }
        const double dl = nodes_[node.left].box.squaredExteriorDistance(x);
        const double dr = nodes_[node.right].box.squaredExteriorDistance(x);
        if (dl <= dr) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    return finish(x, best, best_sq);
}

DistanceValue ReferenceSurface::distance_brute_force(const Vec3& x) const
{
    DistanceValue best{0.0, Vec3::Zero(), Vec3::Zero(), std::numeric_limits<int>::max()};
    double best_sq = std::numeric_limits<double>::infinity();
    for (int f = 0; f < static_cast<int>(mesh_.num_faces()); ++f) candidate(x, f, best, best_sq);
    return finish(x, best, best_sq);
}

DistanceValue distance_eval(const ReferenceSurface& ref, const Vec3& x)
{
    return ref.distance(x);
}

} // namespace infw
