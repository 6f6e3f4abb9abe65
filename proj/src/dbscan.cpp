#include "aeroloc/dbscan.hpp"

#include <deque>
#include <stdexcept>

namespace aeroloc {

ClusterLabeling dbscan(const std::vector<GeoPoint>& points, double eps,
                       std::size_t min_pts) {
    if (eps <= 0.0) throw std::invalid_argument("dbscan: eps must be > 0");
    if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");

    const std::size_t n = points.size();
    ClusterLabeling out;
    out.labels.assign(n, -1);
    if (n == 0) return out;

    std::vector<std::vector<std::size_t>> neighbors(n);
    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            if (points[i].distance_to(points[j]) <= eps) neighbors[i].push_back(j);
        core[i] = neighbors[i].size() >= min_pts;
    }

    std::vector<bool> visited(n, false);
    int next_cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (visited[i] || !core[i]) continue;
        const int cluster = next_cluster++;
        std::deque<std::size_t> frontier{i};
        visited[i] = true;
        out.labels[i] = cluster;
        while (!frontier.empty()) {
            const std::size_t p = frontier.front();
            frontier.pop_front();
            for (std::size_t q : neighbors[p]) {
                if (out.labels[q] == -1) out.labels[q] = cluster;
                if (core[q] && !visited[q]) {
                    visited[q] = true;
                    out.labels[q] = cluster;
                    frontier.push_back(q);
                }
            }
        }
    }
    out.cluster_count = next_cluster;

    std::vector<std::size_t> sizes(static_cast<std::size_t>(next_cluster), 0);
    for (std::size_t i = 0; i < n; ++i)
        if (out.labels[i] >= 0) ++sizes[static_cast<std::size_t>(out.labels[i])];
    int largest = -1;
    std::size_t largest_size = 0;
    for (int c = 0; c < next_cluster; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > largest_size) {
            largest_size = sizes[static_cast<std::size_t>(c)];
            largest = c;
        }
    }
    if (largest >= 0)
        for (std::size_t i = 0; i < n; ++i)
            if (out.labels[i] == largest) out.largest_cluster_indices.push_back(i);
    return out;
}

std::optional<GeoPoint> robust_observation(const RetrievalResult& result,
                                           double eps, std::size_t min_pts) {
    if (result.matches.empty())
        throw std::invalid_argument("robust_observation: empty retrieval result");

    std::vector<GeoPoint> points;
    points.reserve(result.matches.size());
    for (const auto& m : result.matches) points.push_back(m.position);

    const ClusterLabeling labeling = dbscan(points, eps, min_pts);
    if (labeling.cluster_count == 0) return std::nullopt;

    // pick the winning cluster: size, then summed similarity, then lower id
    std::vector<std::size_t> sizes(static_cast<std::size_t>(labeling.cluster_count), 0);
    std::vector<double> sim_sum(static_cast<std::size_t>(labeling.cluster_count), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int c = labeling.labels[i];
        if (c < 0) continue;
        ++sizes[static_cast<std::size_t>(c)];
        sim_sum[static_cast<std::size_t>(c)] += result.matches[i].similarity;
    }
    int best = 0;
    for (int c = 1; c < labeling.cluster_count; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        const auto bu = static_cast<std::size_t>(best);
        if (sizes[cu] > sizes[bu] ||
            (sizes[cu] == sizes[bu] && sim_sum[cu] > sim_sum[bu]))
            best = c;
    }

    double e = 0.0, n = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labeling.labels[i] != best) continue;
        e += points[i].easting;
        n += points[i].northing;
        ++count;
    }
    return GeoPoint{e / static_cast<double>(count), n / static_cast<double>(count)};
}

}  // namespace aeroloc
