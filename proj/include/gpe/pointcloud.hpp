#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpe/common.hpp"
#include "gpe/linalg.hpp"

namespace gpe {

struct PointCloud {
    std::vector<Vec3> points;
    std::optional<int> label;

    int size() const { return static_cast<int>(points.size()); }
};

enum class Split { Train, Val, Test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct Dataset {
    std::string name;
    std::vector<PointCloud> clouds;
    std::vector<Split> splits;  // parallel to clouds
    std::vector<std::string> class_names;

    int n_classes() const { return static_cast<int>(class_names.size()); }
    std::vector<int> indices_of(Split s) const;
};

// FPS centers plus per-center neighbor offsets (k points each, relative to
// the center).
struct PatchSet {
    std::vector<Vec3> centers;
    std::vector<std::vector<Vec3>> patches;
};

// ASCII OFF. Accepts the fused-header variant where the counts follow "OFF"
// on the same line ("OFF3 1 0"), which appears in ModelNet40 files. Faces are
// ignored; vertices become the cloud.
PointCloud parse_off(std::string_view text);

// Whitespace-separated "x y z" per line; extra columns are ignored.
PointCloud parse_xyz(std::string_view text);

// ASCII PLY with a vertex element carrying x/y/z properties.
PointCloud parse_ply_ascii(std::string_view text);

PointCloud load_cloud(const std::string& path);
void save_xyz(const PointCloud& cloud, const std::string& path);

// Center on the centroid, then scale so the farthest point has norm 1.
// Throws DegenerateCloud when all points coincide.
PointCloud normalize(const PointCloud& cloud);

enum class AugmentPolicy {
    None,
    ModelNet,    // uniform scale in [0.8, 1.2] plus one Gaussian offset, sigma 0.01
    ScanObject,  // rotation about the vertical (y) axis, angle in [0, 2pi)
};

AugmentPolicy augment_policy_from_name(const std::string& name);

PointCloud augment(const PointCloud& cloud, uint64_t seed, AugmentPolicy policy);

// Greedy farthest point sampling. First pick is start_index; each later pick
// maximizes the min distance to the picked set, ties to the lowest index.
std::vector<int> fps(const PointCloud& cloud, int m, int start_index);

// k nearest neighbors of each center (ties to the lowest index), expressed
// as offsets from the center.
PatchSet knn_group(const PointCloud& cloud, const std::vector<Vec3>& centers, int k);

// Four surface-sampled classes (sphere, cube, cone, torus) with jitter whose
// norm is clamped at sigma = 0.01, normalized per cloud. Splits assign every
// fourth cloud per class to Val, the rest to Train.
Dataset synth_dataset(uint64_t seed, int n_per_class, int n_points);

// JSON manifest: {name, class_names, records: [{path, label, split}]}.
// Paths are resolved relative to the manifest's directory on load.
Dataset load_manifest(const std::string& manifest_path);
void save_manifest(const Dataset& ds, const std::vector<std::string>& rel_paths,
                   const std::string& manifest_path);

}  // namespace gpe
