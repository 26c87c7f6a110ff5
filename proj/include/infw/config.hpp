#pragma once

#include "infw/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace infw {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Where the starting mesh comes from.
struct MeshSource {
    std::optional<std::filesystem::path> obj;  // takes precedence over the icosphere
    int icosphere = 3;
    double radius = 1.0;
    double perturb = 0.0;
    std::uint64_t seed = 0;
};

/// A run configuration document:
///
///   mesh:     { icosphere: 3, radius: 1.0, perturb: 0.05, seed: 7 }   # or obj: start.obj
///   energy:   { area: 12.566370614359172, sigma: 0, reference: ref.obj }
///   weight:   { type: radial_quadratic, center: [0.5, 0, 0], c: 0.25 }
///   schedule: { p: [2, 4, 8, 16, 32, 64], epsilon_scale: 0.01, max_iters: 2000 }
///   output:   { dir: out, snapshot_every: 1 }
///   verify:   { tau: 0.05, delta_c: 0.10 }
///
/// Relative paths are resolved against the directory of the config file.
struct RunConfig {
    MeshSource mesh;
    double area = 4.0 * 3.14159265358979323846;
    std::optional<double> sigma;  // unset: 0 without reference, 10 h_initial with one
    std::optional<std::filesystem::path> reference;
    WeightSpec weight = ConstantWeight{};
    Schedule schedule;
    std::filesystem::path output_dir = "run_output";
    int snapshot_every = 1;  // stages between OBJ snapshots; 0 keeps only the final mesh
    ThreeValueOptions three_value;
};

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

/// Builds the starting mesh described by the source (validated).
TriMesh make_mesh(const MeshSource& source);

} // namespace infw
