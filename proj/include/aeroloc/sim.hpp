#pragma once

#include "aeroloc/align.hpp"
#include "aeroloc/dbscan.hpp"
#include "aeroloc/features.hpp"
#include "aeroloc/fusion.hpp"
#include "aeroloc/geo.hpp"
#include "aeroloc/retrieval.hpp"
#include "aeroloc/tile_grid.hpp"
#include "aeroloc/vlad.hpp"

#include <cstdint>
#include <vector>

namespace aeroloc {

enum class Pattern { Eight, Rectangle, Lawnmower, Custom };

struct TrajectorySpec {
    Pattern pattern = Pattern::Rectangle;
    double length = 1000.0;  // meters per loop
    double speed = 10.0;     // m/s
    double altitude = 50.0;  // meters, cruise only
    std::size_t loops = 1;
    std::vector<GeoPoint> waypoints;  // Custom pattern only
};

/// Stand-in for VIO internals: a constant unknown initial heading, per-step
/// heading random walk, multiplicative scale error, and distance-scaled
/// position noise.
struct DriftModel {
    double heading_bias = 0.0;        // rad
    double heading_random_walk = 0.0; // rad per sqrt(meter)
    double scale_error = 1.0;
    double position_noise = 0.0;      // m per sqrt(meter)
    std::uint64_t seed = 0;
};

/// Constant-speed sampling of the pattern, centered on world_origin.
GeoTrajectory generate_truth(const TrajectorySpec& spec, const GeoPoint& world_origin,
                             double dt);

/// Drifting local-frame odometry: starts at the local origin with the
/// initial heading removed (unknown position and heading assumption).
OdomTrajectory corrupt_odometry(const GeoTrajectory& truth, const DriftModel& model);

struct PipelineConfig {
    double keyframe_hz = 1.0;
    std::size_t retrieval_k = 5;
    double dbscan_eps = 60.0;       // 1.5x tile spacing at the 40 m default
    std::size_t dbscan_min_pts = 2;
    std::size_t window_capacity = 20;
    std::size_t min_window_pairs = 5;
    double min_window_extent = 30.0;  // meters
    double feature_noise_sigma = 0.0;
    double false_positive_rate = 0.0;
    bool filtering_enabled = true;
    std::uint64_t seed = 0;
};

struct PipelineDiagnostics {
    std::size_t keyframes = 0;
    std::size_t anchor_count = 0;
    std::size_t rejected_updates = 0;
    std::size_t dropped_queries = 0;  // no usable observation after filtering
    std::size_t injected_false_positives = 0;
    double achieved_recall_at_1 = 0.0;
    double first_anchor_time = -1.0;
    AnchorTransform final_anchor;
};

struct PipelineResult {
    GeoTrajectory estimates;
    GeoTrajectory truth;
    AteReport ate_report;
    PipelineDiagnostics diagnostics;
};

/// Full closed loop: keyframes -> encode -> retrieve -> filter -> window ->
/// gravity-constrained anchoring -> EKF fusion.
PipelineResult run_pipeline(const TrajectorySpec& spec, const SyntheticWorld& world,
                            const TileGrid& grid, const Vocabulary& vocab,
                            const DescriptorDb& db, const DriftModel& drift,
                            const FusionConfig& fusion_cfg,
                            const PipelineConfig& cfg);

}  // namespace aeroloc
