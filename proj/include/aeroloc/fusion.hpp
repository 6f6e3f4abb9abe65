#pragma once

#include "aeroloc/geo.hpp"

#include <Eigen/Core>

namespace aeroloc {

struct FusionConfig {
    double process_noise_per_meter = 0.05;            // m^2 per meter traveled
    double memory_obs_variance = 20.0 * 20.0 / 3.0;   // uniform-in-cell bound
    double instant_obs_variance = 30.0 * 30.0;
    double gate_threshold = 9.21;                     // chi-square(2) at 99%
};

/// 2D position filter; heading lives in the anchor transform, not here.
struct FilterState {
    GeoPoint position;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
    bool initialized = false;
    double last_timestamp = 0.0;
    std::size_t rejected_updates = 0;
};

void initialize(FilterState& state, const GeoPoint& first_anchor,
                const FusionConfig& cfg);

/// Random-walk propagation: covariance grows with distance traveled.
void predict(FilterState& state, const Eigen::Vector2d& odom_delta,
             const FusionConfig& cfg);

/// Kalman update against the latest anchored position (long-term memory).
/// Gated by Mahalanobis distance; a rejection leaves the state untouched
/// and increments rejected_updates.
bool update_memory(FilterState& state, const GeoPoint& anchored_pos,
                   const FusionConfig& cfg);

/// Kalman update against the latest filtered VPR observation.
bool update_instant(FilterState& state, const GeoPoint& vpr_obs,
                    const FusionConfig& cfg);

}  // namespace aeroloc
