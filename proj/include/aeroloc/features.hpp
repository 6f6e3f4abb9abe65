#pragma once

#include "aeroloc/geo.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace aeroloc {

/// Dense per-image local features, one row per feature.
struct LocalFeatureSet {
    Eigen::MatrixXf features;  // n x d
    std::string source_id;

    std::size_t count() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

enum class ImageStyle { Satellite, Camera };

struct RepetitionZone {
    GeoPoint center;
    double radius = 0.0;
};

/// Procedural ground-texture model. Feature vectors are a smooth function
/// of ground position, built from a seeded basis dictionary over quantized
/// cells; repetition zones alias distinct locations onto a shared generator.
struct SyntheticWorld {
    std::uint64_t seed = 0;
    double texture_scale = 5.0;      // cell size, meters
    std::size_t n_basis = 8;
    double distinctiveness = 0.9;    // 0 = fully aliased, 1 = fully unique cells
    std::vector<RepetitionZone> repetition_zones;
    std::size_t dim = 64;
    std::size_t features_per_footprint = 256;

    /// Index of the repetition zone containing p, or -1.
    int zone_of(const GeoPoint& p) const;
};

LocalFeatureSet synth_features(const SyntheticWorld& world, const GeoPoint& center,
                               double fov, ImageStyle style, double noise_sigma,
                               std::uint64_t noise_seed = 0);

// Feature file: magic "FLF1", u32 dim, u32 count, then count*dim f32 row-major,
// all little-endian.
LocalFeatureSet load_features(const std::string& path);
void save_features(const LocalFeatureSet& set, const std::string& path);

/// Geometric overlap fraction (intersection area over footprint area) of two
/// square footprints of side fov centered at a and b.
double footprint_overlap(const GeoPoint& a, const GeoPoint& b, double fov);

}  // namespace aeroloc
