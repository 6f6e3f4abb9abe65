#include "aeroloc/sim.hpp"

#include "aeroloc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace aeroloc {

namespace {

/// One loop of the pattern as a dense polyline around the origin,
/// scaled so its arc length equals target_length.
std::vector<Eigen::Vector2d> pattern_polyline(const TrajectorySpec& spec) {
    std::vector<Eigen::Vector2d> pts;

    switch (spec.pattern) {
        case Pattern::Eight: {
            // lemniscate of Gerono: two tangent loops
            const std::size_t n = 4000;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
                pts.emplace_back(std::sin(t), std::sin(t) * std::cos(t));
            }
            pts.push_back(pts.front());
            break;
        }
        case Pattern::Rectangle: {
            // rounded 2:1 rectangle
            const double w = 2.0, h = 1.0, r = 0.15;
            auto arc = [&](double cx, double cy, double a0, double a1) {
                const std::size_t steps = 200;
                for (std::size_t i = 0; i <= steps; ++i) {
                    const double a = a0 + (a1 - a0) * static_cast<double>(i) /
                                              static_cast<double>(steps);
                    pts.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
                }
            };
            arc(w / 2 - r, h / 2 - r, 0.0, M_PI / 2);
            arc(-w / 2 + r, h / 2 - r, M_PI / 2, M_PI);
            arc(-w / 2 + r, -h / 2 + r, M_PI, 1.5 * M_PI);
            arc(w / 2 - r, -h / 2 + r, 1.5 * M_PI, 2.0 * M_PI);
            pts.push_back(pts.front());
            break;
        }
        case Pattern::Lawnmower: {
            const std::size_t passes = 6;
            for (std::size_t p = 0; p < passes; ++p) {
                const double y = static_cast<double>(p) / static_cast<double>(passes - 1) - 0.5;
                const double x0 = (p % 2 == 0) ? -0.5 : 0.5;
                pts.emplace_back(x0, y);
                pts.emplace_back(-x0, y);
            }
            break;
        }
        case Pattern::Custom: {
            if (spec.waypoints.size() < 2)
                throw std::invalid_argument("generate_truth: custom pattern needs >= 2 waypoints");
            for (const auto& w : spec.waypoints) pts.emplace_back(w.easting, w.northing);
            break;
        }
    }

    if (spec.pattern != Pattern::Custom) {
        double len = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
        if (len <= 0.0) throw std::invalid_argument("generate_truth: zero-length pattern");
        const double scale = spec.length / len;
        for (auto& p : pts) p *= scale;
    }
    return pts;
}

}  // namespace

GeoTrajectory generate_truth(const TrajectorySpec& spec, const GeoPoint& world_origin,
                             double dt) {
    if (dt <= 0.0) throw std::invalid_argument("generate_truth: dt must be > 0");
    if (spec.speed <= 0.0 || spec.altitude <= 0.0)
        throw std::invalid_argument("generate_truth: bad trajectory spec");

    const auto loop = pattern_polyline(spec);
    std::vector<Eigen::Vector2d> path;
    const std::size_t loops = std::max<std::size_t>(1, spec.loops);
    for (std::size_t l = 0; l < loops; ++l)
        path.insert(path.end(), loop.begin(), loop.end());

    // cumulative arc length
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < path.size(); ++i)
        cum.push_back(cum.back() + (path[i] - path[i - 1]).norm());
    const double total = cum.back();
    if (total <= 0.0) throw std::invalid_argument("generate_truth: zero-length pattern");

    GeoTrajectory traj;
    std::size_t seg = 0;
    for (std::size_t k = 0;; ++k) {
        const double s = static_cast<double>(k) * spec.speed * dt;
        if (s > total) break;
        while (seg + 1 < cum.size() && cum[seg + 1] < s) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double u = seg_len > 0.0 ? (s - cum[seg]) / seg_len : 0.0;
        const Eigen::Vector2d p = path[seg] + u * (path[seg + 1] - path[seg]);
        traj.samples.push_back({static_cast<double>(k) * dt,
                                {world_origin.easting + p.x(),
                                 world_origin.northing + p.y()}});
    }
    return traj;
}

OdomTrajectory corrupt_odometry(const GeoTrajectory& truth, const DriftModel& model) {
    if (truth.samples.empty())
        throw std::invalid_argument("corrupt_odometry: empty trajectory");
    if (model.scale_error <= 0.0)
        throw std::invalid_argument("corrupt_odometry: scale_error must be > 0");

    Rng rng(hash_combine(model.seed, 0xD41F7ULL));

    OdomTrajectory odom;
    double heading = model.heading_bias;
    Eigen::Vector2d local = Eigen::Vector2d::Zero();

    for (std::size_t k = 0; k < truth.samples.size(); ++k) {
        if (k > 0) {
            const Eigen::Vector2d d_world =
                truth.samples[k].point.vec() - truth.samples[k - 1].point.vec();
            const double step = d_world.norm();
            if (model.heading_random_walk > 0.0)
                heading += model.heading_random_walk * std::sqrt(step) * rng.gaussian();
            const Eigen::Rotation2Dd undo(-heading);
            Eigen::Vector2d d_local = model.scale_error * (undo * d_world);
            if (model.position_noise > 0.0) {
                d_local.x() += model.position_noise * std::sqrt(step) * rng.gaussian();
                d_local.y() += model.position_noise * std::sqrt(step) * rng.gaussian();
            }
            local += d_local;
        }
        OdomPose pose;
        pose.timestamp = truth.samples[k].timestamp;
        pose.position = {local.x(), local.y(), 0.0};
        pose.orientation =
            Eigen::Quaterniond(Eigen::AngleAxisd(-heading, Eigen::Vector3d::UnitZ()));
        odom.poses.push_back(pose);
    }
    return odom;
}

PipelineResult run_pipeline(const TrajectorySpec& spec, const SyntheticWorld& world,
                            const TileGrid& grid, const Vocabulary& vocab,
                            const DescriptorDb& db, const DriftModel& drift,
                            const FusionConfig& fusion_cfg,
                            const PipelineConfig& cfg) {
    ensure_vocab(db, vocab);
    if (cfg.keyframe_hz <= 0.0)
        throw std::invalid_argument("run_pipeline: keyframe_hz must be > 0");

    PipelineResult result;
    const double dt = 1.0 / cfg.keyframe_hz;

    // center the flight pattern on the grid
    const GeoPoint flight_center{grid.origin.easting + grid.extent_x / 2.0,
                                 grid.origin.northing + grid.extent_y / 2.0};
    result.truth = generate_truth(spec, flight_center, dt);
    const OdomTrajectory odom = corrupt_odometry(result.truth, drift);

    // retrieval results of repetition-zone tiles, the false-positive source
    std::vector<RetrievalResult> fp_sources;
    for (std::size_t i = 0; i < grid.tiles.size(); ++i)
        if (world.zone_of(grid.tiles[i].center) >= 0)
            fp_sources.push_back(
                query_topk(db, db.descriptors[i], cfg.retrieval_k));
    if (fp_sources.empty() && cfg.false_positive_rate > 0.0)
        for (std::size_t i = 0; i < grid.tiles.size(); i += 7)
            fp_sources.push_back(
                query_topk(db, db.descriptors[i], cfg.retrieval_k));

    Rng fp_rng(hash_combine(cfg.seed, 0xFA15EULL));

    CorrespondenceWindow window(cfg.window_capacity);
    const GravityVector g_local({0.0, 0.0, -1.0}, GravityFrame::Local);
    const GravityVector g_world({0.0, 0.0, -1.0}, GravityFrame::World);

    FilterState filter;
    bool have_anchor = false;
    AnchorTransform anchor;
    Eigen::Vector3d prev_odom = Eigen::Vector3d::Zero();
    std::size_t recall_hits = 0;

    const double fov = grid.tiles.front().fov;

    for (std::size_t k = 0; k < result.truth.samples.size(); ++k) {
        const auto& truth_sample = result.truth.samples[k];
        const Eigen::Vector3d odom_pos = odom.poses[k].position;
        ++result.diagnostics.keyframes;

        const LocalFeatureSet features = synth_features(
            world, truth_sample.point, fov, ImageStyle::Camera,
            cfg.feature_noise_sigma, hash_combine(cfg.seed, 0xF00DULL + k));
        const VladDescriptor desc = encode(features, vocab);

        RetrievalResult retrieval =
            query_topk(db, desc, cfg.retrieval_k, std::to_string(k));

        const bool inject = cfg.false_positive_rate > 0.0 && !fp_sources.empty() &&
                            fp_rng.uniform01() < cfg.false_positive_rate;
        if (inject) {
            retrieval.matches =
                fp_sources[fp_rng.index(fp_sources.size())].matches;
            ++result.diagnostics.injected_false_positives;
        }

        const auto gt1 = ground_truth_neighbors(grid, truth_sample.point, 1);
        if (!retrieval.matches.empty() && retrieval.matches.front().tile_id == gt1[0])
            ++recall_hits;

        // robust (or raw top-1) geo-observation for this keyframe
        std::optional<GeoPoint> obs;
        if (cfg.filtering_enabled) {
            obs = robust_observation(retrieval, cfg.dbscan_eps, cfg.dbscan_min_pts);
        } else if (!retrieval.matches.empty()) {
            obs = retrieval.matches.front().position;
        }
        if (!obs) ++result.diagnostics.dropped_queries;

        if (obs) {
            window.push(odom_pos, *obs);
            if (window.size() >= cfg.min_window_pairs &&
                window.horizontal_extent() >= cfg.min_window_extent) {
                const AlignmentReport rep = align_gravity(window, g_local, g_world);
                anchor = rep.transform;
                have_anchor = true;
                ++result.diagnostics.anchor_count;
                if (result.diagnostics.first_anchor_time < 0.0)
                    result.diagnostics.first_anchor_time = truth_sample.timestamp;
            }
        }

        if (have_anchor) {
            const Eigen::Vector3d anchored = apply_transform(anchor, odom_pos);
            if (!filter.initialized) {
                initialize(filter, {anchored.x(), anchored.y()}, fusion_cfg);
            } else {
                const Eigen::Vector3d delta = anchor.rotation * (odom_pos - prev_odom);
                predict(filter, delta.head<2>(), fusion_cfg);
                update_memory(filter, {anchored.x(), anchored.y()}, fusion_cfg);
                if (obs) update_instant(filter, *obs, fusion_cfg);
            }
            filter.last_timestamp = truth_sample.timestamp;
            result.estimates.samples.push_back({truth_sample.timestamp, filter.position});
        }
        prev_odom = odom_pos;
    }

    result.diagnostics.rejected_updates = filter.rejected_updates;
    result.diagnostics.final_anchor = anchor;
    result.diagnostics.achieved_recall_at_1 =
        static_cast<double>(recall_hits) /
        static_cast<double>(result.diagnostics.keyframes);

    if (!result.estimates.samples.empty())
        result.ate_report = ate(result.estimates, result.truth);
    return result;
}

}  // namespace aeroloc
