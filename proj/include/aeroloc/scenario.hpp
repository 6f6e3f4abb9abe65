#pragma once

#include "aeroloc/sim.hpp"

#include <string>

namespace aeroloc {

/// Declarative experiment description: world, grid, drift, retrieval, and
/// fusion parameters in one key-value file. Defaults follow the reference
/// configuration (40 m spacing, 60 m fov, 1 Hz keyframes, 10 m/s).
struct Scenario {
    SyntheticWorld world;
    GeoPoint grid_origin{0.0, 0.0};
    double grid_extent_x = 400.0;
    double grid_extent_y = 360.0;
    double grid_spacing = 40.0;
    double grid_fov = 60.0;
    std::size_t vocab_n_c = 128;
    std::size_t vocab_train_tiles = 40;  // tiles sampled for vocabulary training
    TrajectorySpec trajectory;
    DriftModel drift;
    FusionConfig fusion;
    PipelineConfig pipeline;

    TileGrid make_grid() const;
    Vocabulary make_vocabulary() const;
    DescriptorDb make_db(const TileGrid& grid, const Vocabulary& vocab) const;
};

/// Parses a scenario file of `key = value` lines (# comments). Unknown keys
/// are rejected with the offending key named.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);

/// Applies a master seed to all seeded sub-components.
void apply_seed(Scenario& s, std::uint64_t seed);

}  // namespace aeroloc
