#pragma once

#include "aeroloc/geo.hpp"

#include <deque>
#include <utility>

namespace aeroloc {

/// Sliding window of (local position, geo observation) pairs; oldest pairs
/// are evicted once capacity is exceeded.
class CorrespondenceWindow {
public:
    explicit CorrespondenceWindow(std::size_t capacity = 20) : capacity_(capacity) {}

    void push(const Eigen::Vector3d& local, const GeoPoint& obs) {
        pairs_.emplace_back(local, obs.lifted());
        while (pairs_.size() > capacity_) pairs_.pop_front();
    }

    std::size_t size() const { return pairs_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::pair<Eigen::Vector3d, Eigen::Vector3d>& pair(std::size_t i) const {
        return pairs_[i];
    }

    /// Horizontal spread of local positions: largest singular value of the
    /// centered 2D scatter (meters).
    double horizontal_extent() const;

private:
    std::size_t capacity_;
    std::deque<std::pair<Eigen::Vector3d, Eigen::Vector3d>> pairs_;
};

struct AlignmentReport {
    AnchorTransform transform;
    double rms_residual = 0.0;
    double spread = 0.0;     // largest horizontal scatter singular value
    double condition = 1.0;  // ratio of the two horizontal singular values
    bool degenerate = false;
};

/// Unconstrained closed-form least-squares rigid alignment (centroid
/// subtraction + cross-covariance SVD, reflection-corrected). Flags
/// degeneracy when the horizontal scatter is near-colinear.
AlignmentReport align_rigid(const CorrespondenceWindow& window,
                            double condition_threshold = 50.0);

/// Gravity-constrained alignment: gravity is a hard constraint, the free
/// yaw about the world gravity axis has a closed form, translation from
/// centroids. Well-posed for any >= 2 distinct points, colinear included.
AlignmentReport align_gravity(const CorrespondenceWindow& window,
                              const GravityVector& g_local,
                              const GravityVector& g_world);

/// Soft-weighted variant: minimizes the trajectory term plus
/// gravity_weight * ||R g_L - g_W||^2 by Gauss-Newton over the full
/// rotation. Approaches align_gravity as gravity_weight grows.
AlignmentReport align_gravity_soft(const CorrespondenceWindow& window,
                                   const GravityVector& g_local,
                                   const GravityVector& g_world,
                                   double gravity_weight,
                                   std::size_t max_iters = 100);

}  // namespace aeroloc
