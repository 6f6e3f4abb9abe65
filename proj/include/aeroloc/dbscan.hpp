#pragma once

#include "aeroloc/geo.hpp"
#include "aeroloc/retrieval.hpp"

#include <optional>
#include <vector>

namespace aeroloc {

/// DBSCAN output; label -1 marks noise, cluster ids are contiguous from 0.
struct ClusterLabeling {
    std::vector<int> labels;
    std::vector<std::size_t> largest_cluster_indices;
    int cluster_count = 0;
};

/// Standard DBSCAN over 2D points. A point is core iff at least min_pts
/// points (itself included) lie within eps. Deterministic for a fixed input
/// order: seeds expand in input order, border points go to the first
/// claiming cluster.
ClusterLabeling dbscan(const std::vector<GeoPoint>& points, double eps,
                       std::size_t min_pts);

/// Runs DBSCAN on a query's match positions and returns the centroid of the
/// largest cluster, or nothing when every point is noise. Size ties go to
/// the cluster with higher summed similarity, then lower cluster id.
std::optional<GeoPoint> robust_observation(const RetrievalResult& result,
                                           double eps, std::size_t min_pts);

}  // namespace aeroloc
