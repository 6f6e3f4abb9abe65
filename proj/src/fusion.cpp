#include "aeroloc/fusion.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace aeroloc {

namespace {

bool kalman_update(FilterState& state, const GeoPoint& obs, double variance,
                   double gate_threshold) {
    if (!state.initialized)
        throw std::logic_error("fusion: update before initialization");

    const Eigen::Vector2d innovation = obs.vec() - state.position.vec();
    const Eigen::Matrix2d s =
        state.covariance + variance * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d s_inv = s.inverse();

    const double mahalanobis_sq = innovation.dot(s_inv * innovation);
    if (mahalanobis_sq > gate_threshold) {
        ++state.rejected_updates;
        return false;
    }

    const Eigen::Matrix2d gain = state.covariance * s_inv;
    const Eigen::Vector2d corrected = state.position.vec() + gain * innovation;
    state.position = {corrected.x(), corrected.y()};

    // Joseph form keeps the covariance symmetric PD
    const Eigen::Matrix2d ikh = Eigen::Matrix2d::Identity() - gain;
    state.covariance = ikh * state.covariance * ikh.transpose() +
                       gain * (variance * Eigen::Matrix2d::Identity()) *
                           gain.transpose();
    state.covariance = 0.5 * (state.covariance + state.covariance.transpose());
    return true;
}

}  // namespace

void initialize(FilterState& state, const GeoPoint& first_anchor,
                const FusionConfig& cfg) {
    if (state.initialized) throw std::logic_error("fusion: double initialization");
    state.position = first_anchor;
    state.covariance = cfg.memory_obs_variance * Eigen::Matrix2d::Identity();
    state.initialized = true;
}

void predict(FilterState& state, const Eigen::Vector2d& odom_delta,
             const FusionConfig& cfg) {
    if (!state.initialized)
        throw std::logic_error("fusion: predict before initialization");
    state.position = {state.position.easting + odom_delta.x(),
                      state.position.northing + odom_delta.y()};
    state.covariance += cfg.process_noise_per_meter * odom_delta.norm() *
                        Eigen::Matrix2d::Identity();
}

bool update_memory(FilterState& state, const GeoPoint& anchored_pos,
                   const FusionConfig& cfg) {
    return kalman_update(state, anchored_pos, cfg.memory_obs_variance,
                         cfg.gate_threshold);
}

bool update_instant(FilterState& state, const GeoPoint& vpr_obs,
                    const FusionConfig& cfg) {
    return kalman_update(state, vpr_obs, cfg.instant_obs_variance,
                         cfg.gate_threshold);
}

}  // namespace aeroloc
