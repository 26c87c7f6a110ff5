#pragma once

#include "infw/mesh.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace infw::fixtures {

/// (n+1) x (n+1) grid over [-half, half]^2 lifted by z = height(x, y). Open
/// mesh, only meant for operator tests at interior vertices. Triangles are
/// wound clockwise seen from +z so a convex-from-below graph has its normal
/// pointing away from the centre of curvature (-z at the origin).
inline TriMesh graph_patch(int n, double half, const std::function<double(double, double)>& height)
{
    std::vector<Vec3> pos;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const double x = -half + 2.0 * half * i / n;
            const double y = -half + 2.0 * half * j / n;
            pos.emplace_back(x, y, height(x, y));
        }
    std::vector<Triangle> tris;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            tris.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
            tris.push_back({id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)});
        }
    return TriMesh(std::move(pos), std::move(tris));
}

/// Flat patch with jittered interior vertices (still planar).
inline TriMesh planar_patch(int n, std::uint64_t seed)
{
    TriMesh grid = graph_patch(n, 1.0, [](double, double) { return 0.0; });
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.2 / n, 0.2 / n);
    auto pos = grid.positions();
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            auto& p = pos[static_cast<std::size_t>(j * (n + 1) + i)];
            p.x() += jitter(rng);
            p.y() += jitter(rng);
        }
    return grid.with_positions(std::move(pos));
}

/// Closed surface of revolution about the z axis with radius profile r(z),
/// z in [-half_length, half_length], r vanishing at both ends.
inline TriMesh revolution_surface(int rings, int segments, double half_length,
                                  const std::function<double(double)>& radius)
{
    std::vector<Vec3> pos;
    pos.emplace_back(0.0, 0.0, -half_length);  // south pole
    for (int k = 1; k < rings; ++k) {
        // Cosine spacing concentrates rings near the poles.
        const double z = -half_length * std::cos(std::numbers::pi * k / rings);
        const double r = radius(z);
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * std::numbers::pi * s / segments;
            pos.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
        }
    }
    pos.emplace_back(0.0, 0.0, half_length);  // north pole
    const int north = static_cast<int>(pos.size()) - 1;
    auto ring = [segments](int k, int s) { return 1 + (k - 1) * segments + (s % segments); };

    std::vector<Triangle> tris;
    for (int s = 0; s < segments; ++s) tris.push_back({0, ring(1, s + 1), ring(1, s)});
    for (int k = 1; k + 1 < rings; ++k)
        for (int s = 0; s < segments; ++s) {
            tris.push_back({ring(k, s), ring(k, s + 1), ring(k + 1, s)});
            tris.push_back({ring(k, s + 1), ring(k + 1, s + 1), ring(k + 1, s)});
        }
    for (int s = 0; s < segments; ++s) tris.push_back({north, ring(rings - 1, s), ring(rings - 1, s + 1)});
    return TriMesh(std::move(pos), std::move(tris));
}

/// Two unit spheres joined by a neck of radius `neck` at z = 0.
inline TriMesh dumbbell(double neck = 0.1, int rings = 60, int segments = 48)
{
    return revolution_surface(rings, segments, 2.0, [neck](double z) {
        const double a = std::abs(z) - 1.0;
        const double r2 = (1.0 - a * a) + neck * neck * (1.0 - z * z / 4.0);
        return std::sqrt(std::max(r2, 0.0));
    });
}

inline TriMesh ellipsoid(int subdivisions, const Vec3& axes)
{
    return transformed(build_icosphere(subdivisions, 1.0), axes);
}

/// A varied set of valid closed meshes.
inline std::vector<TriMesh> assorted_meshes()
{
    std::vector<TriMesh> meshes;
    for (int s = 0; s <= 4; ++s) meshes.push_back(build_icosphere(s, 1.0));
    for (std::uint64_t seed = 1; seed <= 8; ++seed)
        meshes.push_back(perturb_radial(build_icosphere(2 + static_cast<int>(seed % 2), 1.0),
                                        0.02 * static_cast<double>(seed), seed));
    meshes.push_back(ellipsoid(3, Vec3(2.0, 1.0, 1.0)));
    meshes.push_back(ellipsoid(3, Vec3(1.3, 0.9, 0.7)));
    meshes.push_back(ellipsoid(2, Vec3(0.5, 0.5, 3.0)));
    meshes.push_back(transformed(build_icosphere(3, 2.0), Vec3(1, 1, 1), Vec3(5.0, -3.0, 1.0)));
    meshes.push_back(build_icosphere(3, 0.01));
    meshes.push_back(dumbbell(0.1));
    meshes.push_back(dumbbell(0.5, 40, 32));
    return meshes;
}

/// Smooth test field on positions.
inline VertexField smooth_field(const TriMesh& mesh)
{
    VertexField phi(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const Vec3& x = mesh.positions()[i];
        phi[static_cast<Eigen::Index>(i)] = x.z() * x.z() + 0.5 * x.x() + 0.3 * x.x() * x.y();
    }
    return phi;
}

} // namespace infw::fixtures
