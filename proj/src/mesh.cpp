#include "infw/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace infw {

namespace {

std::shared_ptr<const Topology> build_topology(std::vector<Triangle> triangles, std::size_t nv)
{
    auto topo = std::make_shared<Topology>();
    topo->num_vertices = nv;

    for (std::size_t f = 0; f < triangles.size(); ++f) {
        for (int idx : triangles[f]) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= nv) {
                throw MeshError("triangle " + std::to_string(f) + " references vertex " +
                                std::to_string(idx) + " out of range [0, " + std::to_string(nv) +
                                ")");
            }
        }
    }

    // Directed half-edges keyed by (min, max, direction); sorting gives a
    // deterministic edge numbering.
    struct HalfEdgeKey {
        int lo, hi, dir;
        auto operator<=>(const HalfEdgeKey&) const = default;
    };
    std::vector<HalfEdgeKey> half_edges;
    half_edges.reserve(3 * triangles.size());
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k];
            int b = t[(k + 1) % 3];
            if (a == b) continue;
            half_edges.push_back({std::min(a, b), std::max(a, b), a < b ? 0 : 1});
        }
    }
    std::sort(half_edges.begin(), half_edges.end());
    for (std::size_t i = 0; i < half_edges.size();) {
        std::size_t j = i;
        std::array<int, 2> counts{0, 0};
        while (j < half_edges.size() && half_edges[j].lo == half_edges[i].lo &&
               half_edges[j].hi == half_edges[i].hi) {
            ++counts[half_edges[j].dir];
            ++j;
        }
        topo->edges.push_back({half_edges[i].lo, half_edges[i].hi});
        topo->edge_direction_counts.push_back(counts);
        i = j;
    }

    topo->vertex_face_offsets.assign(nv + 1, 0);
    for (const auto& t : triangles)
        for (int idx : t) ++topo->vertex_face_offsets[idx + 1];
    for (std::size_t v = 0; v < nv; ++v)
        topo->vertex_face_offsets[v + 1] += topo->vertex_face_offsets[v];
    topo->vertex_faces.resize(topo->vertex_face_offsets[nv]);
    std::vector<int> cursor(topo->vertex_face_offsets.begin(), topo->vertex_face_offsets.end() - 1);
    for (std::size_t f = 0; f < triangles.size(); ++f)
        for (int idx : triangles[f]) topo->vertex_faces[cursor[idx]++] = static_cast<int>(f);

    topo->triangles = std::move(triangles);
    return topo;
}

double face_area(const Vec3& a, const Vec3& b, const Vec3& c)
{
    return 0.5 * (b - a).cross(c - a).norm();
}

} // namespace

TriMesh::TriMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles)
    : positions_(std::move(positions))
{
    topology_ = build_topology(std::move(triangles), positions_.size());
}

TriMesh TriMesh::with_positions(std::vector<Vec3> positions) const
{
    if (positions.size() != positions_.size())
        throw MeshError("with_positions: vertex count mismatch");
    TriMesh out;
    out.positions_ = std::move(positions);
    out.topology_ = topology_;
    return out;
}

TriMesh TriMesh::flipped() const
{
    std::vector<Triangle> tris = triangles();
    for (auto& t : tris) std::swap(t[1], t[2]);
    return TriMesh(positions_, std::move(tris));
}

TriMesh build_icosphere(int subdivisions, double radius)
{
    if (subdivisions < 0 || subdivisions > 8)
        throw MeshError("icosphere subdivision level must be in [0, 8], got " +
                        std::to_string(subdivisions));
    if (!(radius > 0.0)) throw MeshError("icosphere radius must be positive");

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> pts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    std::vector<Triangle> tris = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (auto& p : pts) p.normalize();

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            pts.push_back((0.5 * (pts[a] + pts[b])).normalized());
            int idx = static_cast<int>(pts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Triangle> next;
        next.reserve(4 * tris.size());
        for (const auto& tri : tris) {
            int a = mid(tri[0], tri[1]);
            int b = mid(tri[1], tri[2]);
            int c = mid(tri[2], tri[0]);
            next.push_back({tri[0], a, c});
            next.push_back({tri[1], b, a});
            next.push_back({tri[2], c, b});
            next.push_back({a, b, c});
        }
        tris = std::move(next);
    }
    for (auto& p : pts) p *= radius;
    return TriMesh(std::move(pts), std::move(tris));
}

ValidationReport validate(const TriMesh& mesh)
{
    ValidationReport report;
    const Topology& topo = mesh.topology();
    report.indices_in_range = true;  // enforced by the TriMesh constructor
    report.euler_characteristic = topo.euler_characteristic();

    int boundary = 0, nonmanifold = 0, misoriented = 0;
    for (const auto& c : topo.edge_direction_counts) {
        int total = c[0] + c[1];
        if (total == 1)
            ++boundary;
        else if (total > 2)
            ++nonmanifold;
        else if (c[0] != 1 || c[1] != 1)
            ++misoriented;
    }
    report.closed_manifold = boundary == 0 && nonmanifold == 0;
    report.consistently_oriented = misoriented == 0 && nonmanifold == 0;
    if (boundary > 0)
        report.problems.push_back("boundary edge detected (" + std::to_string(boundary) +
                                  " edges with a single incident triangle)");
    if (nonmanifold > 0)
        report.problems.push_back("non-manifold edge detected (" + std::to_string(nonmanifold) +
                                  " edges with more than two incident triangles)");
    if (misoriented > 0)
        report.problems.push_back("orientation inconsistency (" + std::to_string(misoriented) +
                                  " edges traversed twice in the same direction)");

    for (std::size_t v = 0; v < topo.num_vertices; ++v) {
        if (topo.vertex_face_offsets[v] == topo.vertex_face_offsets[v + 1]) {
            report.problems.push_back("isolated vertex " + std::to_string(v));
            break;
        }
    }

    if (report.euler_characteristic != 2)
        report.problems.push_back("Euler characteristic is " +
                                  std::to_string(report.euler_characteristic) +
                                  ", expected 2 (sphere topology)");

    const auto& P = mesh.positions();
    report.min_triangle_area = std::numeric_limits<double>::infinity();
    bool degenerate = false;
    report.min_triangle_quality = std::numeric_limits<double>::infinity();
    for (const auto& t : topo.triangles) {
        const Vec3& a = P[t[0]];
        const Vec3& b = P[t[1]];
        const Vec3& c = P[t[2]];
        double area = face_area(a, b, c);
        double l2 = (b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm();
        report.min_triangle_area = std::min(report.min_triangle_area, area);
        if (is_degenerate_triangle(a, b, c)) degenerate = true;
        report.min_triangle_quality =
            std::min(report.min_triangle_quality, l2 > 0 ? 4.0 * std::sqrt(3.0) * area / l2 : 0.0);
        for (int k = 0; k < 3; ++k) {
            Vec3 u = P[t[(k + 1) % 3]] - P[t[k]];
            Vec3 w = P[t[(k + 2) % 3]] - P[t[k]];
            if (u.dot(w) < 0.0) ++report.negative_cotan_weights;
        }
    }
    if (topo.triangles.empty()) {
        report.min_triangle_area = 0.0;
        report.min_triangle_quality = 0.0;
        report.problems.push_back("mesh has no triangles");
    } else if (degenerate) {
        report.problems.push_back("degenerate triangle (zero area)");
    }
    return report;
}

void require_valid(const TriMesh& mesh)
{
    auto report = validate(mesh);
    if (report.ok()) return;
    std::string msg = "invalid mesh:";
    for (const auto& p : report.problems) msg += " " + p + ";";
    throw MeshError(msg);
}

bool is_degenerate_triangle(const Vec3& a, const Vec3& b, const Vec3& c)
{
    const double longest = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
    return !(face_area(a, b, c) > 1e-14 * longest);
}

double triangle_area(const TriMesh& mesh, std::size_t face)
{
    const auto& t = mesh.triangles()[face];
    const auto& P = mesh.positions();
    return face_area(P[t[0]], P[t[1]], P[t[2]]);
}

double total_area(const TriMesh& mesh)
{
    double sum = 0.0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) sum += triangle_area(mesh, f);
    return sum;
}

VertexField vertex_measure(const TriMesh& mesh)
{
    const auto& P = mesh.positions();
    VertexField a = VertexField::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangles()[f];
        const double area = triangle_area(mesh, f);
        if (is_degenerate_triangle(P[t[0]], P[t[1]], P[t[2]]))
            throw MeshError("vertex_measure: degenerate triangle " + std::to_string(f));
        // Mixed Voronoi cells: circumcentric split for non-obtuse triangles,
        // half/quarter split otherwise. The cells partition the triangle.
        int obtuse = -1;
        std::array<double, 3> cot{};
        for (int k = 0; k < 3; ++k) {
            const Vec3 u = P[t[(k + 1) % 3]] - P[t[k]];
            const Vec3 w = P[t[(k + 2) % 3]] - P[t[k]];
            const double dot = u.dot(w);
            if (dot < 0.0) obtuse = k;
            cot[k] = dot / (2.0 * area);
        }
        if (obtuse < 0) {
            for (int k = 0; k < 3; ++k) {
                const int i = t[k];
                const int j = t[(k + 1) % 3];
                const int l = t[(k + 2) % 3];
                // Edge (i, j) is opposite corner l, edge (i, l) is opposite corner j.
                a[i] += ((P[j] - P[i]).squaredNorm() * cot[(k + 2) % 3] +
                         (P[l] - P[i]).squaredNorm() * cot[(k + 1) % 3]) /
                        8.0;
            }
        } else {
            for (int k = 0; k < 3; ++k) a[t[k]] += (k == obtuse ? 0.5 : 0.25) * area;
        }
    }
    return a;
}

Vec3 area_centroid(const TriMesh& mesh)
{
    const auto& P = mesh.positions();
    Vec3 c = Vec3::Zero();
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangles()[f];
        double area = triangle_area(mesh, f);
        c += area * (P[t[0]] + P[t[1]] + P[t[2]]) / 3.0;
        total += area;
    }
    if (!(total > 0.0)) throw MeshError("area_centroid: mesh has zero area");
    return c / total;
}

TriMesh rescale_to_area(const TriMesh& mesh, double target_area)
{
    if (!(target_area > 0.0)) throw MeshError("rescale_to_area: target area must be positive");
    double area = total_area(mesh);
    if (!(area > 0.0)) throw MeshError("rescale_to_area: mesh has zero area");
    double s = std::sqrt(target_area / area);
    Vec3 c = area_centroid(mesh);
    std::vector<Vec3> out(mesh.positions());
    for (auto& p : out) p = c + s * (p - c);
    return mesh.with_positions(std::move(out));
}

TriMesh load_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open OBJ file '" + path.string() + "'");

    std::vector<Vec3> pts;
    std::vector<Triangle> tris;
    std::vector<std::pair<std::size_t, std::array<long, 3>>> raw_faces;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z()))
                throw MeshError(path.string() + ":" + std::to_string(lineno) +
                                ": malformed vertex record");
            pts.push_back(p);
        } else if (tag == "f") {
            std::vector<long> idx;
            std::string tok;
            while (ls >> tok) {
                // Accept "i", "i/t", "i/t/n", "i//n"; only the position index is used.
                auto slash = tok.find('/');
                try {
                    idx.push_back(std::stol(tok.substr(0, slash)));
                } catch (const std::exception&) {
                    throw MeshError(path.string() + ":" + std::to_string(lineno) +
                                    ": malformed face index '" + tok + "'");
                }
            }
            if (idx.size() != 3)
                throw MeshError(path.string() + ":" + std::to_string(lineno) +
                                ": non-triangular face with " + std::to_string(idx.size()) +
                                " vertices");
            raw_faces.push_back({lineno, {idx[0], idx[1], idx[2]}});
        }
    }
    if (in.bad()) throw MeshError("error reading OBJ file '" + path.string() + "'");

    const long nv = static_cast<long>(pts.size());
    for (const auto& [ln, f] : raw_faces) {
        Triangle t{};
        for (int k = 0; k < 3; ++k) {
            long i = f[k];
            long zero_based = i > 0 ? i - 1 : nv + i;  // negative indices are relative
            if (i == 0 || zero_based < 0 || zero_based >= nv)
                throw MeshError(path.string() + ":" + std::to_string(ln) +
                                ": face index " + std::to_string(i) + " out of range");
            t[k] = static_cast<int>(zero_based);
        }
        tris.push_back(t);
    }
    return TriMesh(std::move(pts), std::move(tris));
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path)
{
    std::FILE* fp = std::fopen(path.string().c_str(), "w");
    if (!fp) throw MeshError("cannot write OBJ file '" + path.string() + "'");
    for (const auto& p : mesh.positions())
        std::fprintf(fp, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    for (const auto& t : mesh.triangles())
        std::fprintf(fp, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    bool failed = std::ferror(fp) != 0;
    failed |= std::fclose(fp) != 0;
    if (failed) throw MeshError("error writing OBJ file '" + path.string() + "'");
}

TriMesh perturb_radial(const TriMesh& mesh, double amplitude, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Vec3 c = area_centroid(mesh);
    std::vector<Vec3> out(mesh.positions());
    for (auto& p : out) {
        // 53-bit uniform in [0, 1) built directly from the engine output so the
        // sequence does not depend on the standard library's distributions.
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        p = c + (1.0 + amplitude * (2.0 * u - 1.0)) * (p - c);
    }
    return mesh.with_positions(std::move(out));
}

TriMesh transformed(const TriMesh& mesh, const Vec3& scale, const Vec3& offset)
{
    std::vector<Vec3> out(mesh.positions());
    for (auto& p : out) p = scale.cwiseProduct(p) + offset;
    return mesh.with_positions(std::move(out));
}

} // namespace infw
