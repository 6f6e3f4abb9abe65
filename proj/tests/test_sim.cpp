#include "aeroloc/scenario.hpp"
#include "aeroloc/sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace aeroloc;

namespace {

double path_length(const GeoTrajectory& traj) {
    double len = 0.0;
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        len += traj.samples[i].point.distance_to(traj.samples[i - 1].point);
    return len;
}

double odom_length(const OdomTrajectory& odom) {
    double len = 0.0;
    for (std::size_t i = 1; i < odom.poses.size(); ++i)
        len += (odom.poses[i].position - odom.poses[i - 1].position).norm();
    return len;
}

}  // namespace

TEST_CASE("rectangle loop: 1000 m at 10 m/s lasts 100 s") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Rectangle;
    spec.length = 1000.0;
    spec.speed = 10.0;
    const auto traj = generate_truth(spec, {0, 0}, 1.0);
    // arc-length rounding of the dense polyline may shave the final sample
    REQUIRE(traj.samples.size() >= 100);
    REQUIRE(traj.samples.size() <= 101);
    CHECK(traj.samples.back().timestamp ==
          doctest::Approx(100.0).epsilon(0.02));
    // constant-speed resampling: every step covers speed * dt meters of arc
    // length; the chord is shorter on the rounded corners
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const double chord =
            traj.samples[i].point.distance_to(traj.samples[i - 1].point);
        CHECK(chord <= 10.0 + 1e-9);
        CHECK(chord > 9.0);
    }
    // the loop closes to within one resampling step
    CHECK(traj.samples.back().point.distance_to(traj.samples.front().point) < 10.5);
}

TEST_CASE("figure-eight loop: 880 m at 10 m/s lasts 88 s") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Eight;
    spec.length = 880.0;
    spec.speed = 10.0;
    const auto traj = generate_truth(spec, {200, 180}, 1.0);
    // arc-length rounding of the dense polyline may shave the final sample
    REQUIRE(traj.samples.size() >= 88);
    REQUIRE(traj.samples.size() <= 89);
    CHECK(traj.samples.back().timestamp ==
          doctest::Approx(88.0).epsilon(0.02));
    CHECK(path_length(traj) == doctest::Approx(880.0).epsilon(0.02));
}

TEST_CASE("multiple loops concatenate") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Rectangle;
    spec.length = 500.0;
    spec.speed = 10.0;
    spec.loops = 3;
    const auto traj = generate_truth(spec, {0, 0}, 1.0);
    CHECK(traj.samples.back().timestamp == doctest::Approx(150.0).epsilon(0.02));
}

TEST_CASE("custom waypoints traverse the given perimeter") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Custom;
    spec.speed = 10.0;
    spec.waypoints = {{0, 0}, {100, 0}, {100, 100}, {0, 100}, {0, 0}};
    const auto traj = generate_truth(spec, {0, 0}, 1.0);
    REQUIRE(traj.samples.size() == 41);
    CHECK(path_length(traj) == doctest::Approx(400.0).epsilon(1e-9));
    CHECK(traj.samples[10].point.easting == doctest::Approx(100.0));
    CHECK(traj.samples[10].point.northing == doctest::Approx(0.0));
}

TEST_CASE("trajectory argument validation") {
    TrajectorySpec spec;
    CHECK_THROWS_AS(generate_truth(spec, {0, 0}, 0.0), std::invalid_argument);
    spec.speed = -1.0;
    CHECK_THROWS_AS(generate_truth(spec, {0, 0}, 1.0), std::invalid_argument);
    TrajectorySpec custom;
    custom.pattern = Pattern::Custom;
    custom.waypoints = {{0, 0}};
    CHECK_THROWS_AS(generate_truth(custom, {0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("drift-free odometry reproduces the translated trajectory") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Eight;
    spec.length = 600.0;
    const auto truth = generate_truth(spec, {500, 700}, 1.0);
    const auto odom = corrupt_odometry(truth, DriftModel{});
    REQUIRE(odom.poses.size() == truth.samples.size());
    const Eigen::Vector2d start = truth.samples.front().point.vec();
    for (std::size_t i = 0; i < odom.poses.size(); ++i) {
        const Eigen::Vector2d expect = truth.samples[i].point.vec() - start;
        CHECK((odom.poses[i].position.head<2>() - expect).norm() < 1e-9);
        CHECK(odom.poses[i].position.z() == 0.0);
    }
}

TEST_CASE("heading bias rotates the local frame; scale error stretches it") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Rectangle;
    spec.length = 800.0;
    const auto truth = generate_truth(spec, {0, 0}, 1.0);

    DriftModel biased;
    biased.heading_bias = 0.5;
    const auto odom = corrupt_odometry(truth, biased);
    const Eigen::Rotation2Dd undo(-0.5);
    const Eigen::Vector2d start = truth.samples.front().point.vec();
    for (std::size_t i = 0; i < odom.poses.size(); ++i) {
        const Eigen::Vector2d expect = undo * (truth.samples[i].point.vec() - start);
        CHECK((odom.poses[i].position.head<2>() - expect).norm() < 1e-9);
    }

    DriftModel scaled;
    scaled.scale_error = 1.05;
    const auto stretched = corrupt_odometry(truth, scaled);
    CHECK(odom_length(stretched) ==
          doctest::Approx(1.05 * path_length(truth)).epsilon(1e-9));
}

TEST_CASE("position noise accumulates like a random walk in distance") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Rectangle;
    spec.speed = 10.0;
    DriftModel noisy;
    noisy.position_noise = 0.5;  // m per sqrt(meter)

    // average final offset over seeds for a short and a 4x longer flight;
    // the random walk predicts roughly a 2x ratio
    double short_err = 0.0, long_err = 0.0;
    const int seeds = 40;
    for (int s = 0; s < seeds; ++s) {
        noisy.seed = static_cast<std::uint64_t>(s);
        spec.length = 500.0;
        const auto t1 = generate_truth(spec, {0, 0}, 1.0);
        const auto o1 = corrupt_odometry(t1, noisy);
        short_err += (o1.poses.back().position.head<2>() -
                      (t1.samples.back().point.vec() - t1.samples.front().point.vec()))
                         .norm();
        spec.length = 2000.0;
        const auto t2 = generate_truth(spec, {0, 0}, 1.0);
        const auto o2 = corrupt_odometry(t2, noisy);
        long_err += (o2.poses.back().position.head<2>() -
                     (t2.samples.back().point.vec() - t2.samples.front().point.vec()))
                        .norm();
    }
    CHECK(long_err / short_err > 1.3);
    CHECK(long_err / short_err < 3.0);

    // same seed, same corruption
    noisy.seed = 7;
    spec.length = 500.0;
    const auto t = generate_truth(spec, {0, 0}, 1.0);
    const auto a = corrupt_odometry(t, noisy);
    const auto b = corrupt_odometry(t, noisy);
    for (std::size_t i = 0; i < a.poses.size(); ++i)
        CHECK((a.poses[i].position - b.poses[i].position).norm() == 0.0);
}

TEST_CASE("gravity alignment inverts an injected heading bias") {
    TrajectorySpec spec;
    spec.pattern = Pattern::Rectangle;
    spec.length = 600.0;
    const auto truth = generate_truth(spec, {300, 400}, 1.0);
    DriftModel biased;
    biased.heading_bias = -0.8;
    const auto odom = corrupt_odometry(truth, biased);

    CorrespondenceWindow window(truth.samples.size());
    for (std::size_t i = 0; i < truth.samples.size(); ++i)
        window.push(odom.poses[i].position, truth.samples[i].point);
    const GravityVector gl({0, 0, -1}, GravityFrame::Local);
    const GravityVector gw({0, 0, -1}, GravityFrame::World);
    const auto rep = align_gravity(window, gl, gw);

    CHECK(rep.rms_residual < 1e-6);
    const double yaw = std::atan2(rep.transform.rotation(1, 0),
                                  rep.transform.rotation(0, 0));
    CHECK(yaw == doctest::Approx(-0.8).epsilon(1e-6));
    for (std::size_t i = 0; i < truth.samples.size(); ++i) {
        const Eigen::Vector3d mapped =
            apply_transform(rep.transform, odom.poses[i].position);
        CHECK(std::abs(mapped.x() - truth.samples[i].point.easting) < 1e-6);
        CHECK(std::abs(mapped.y() - truth.samples[i].point.northing) < 1e-6);
    }
}

TEST_CASE("scenario defaults and parsing") {
    const Scenario def = parse_scenario("");
    CHECK(def.grid_spacing == doctest::Approx(40.0));
    CHECK(def.grid_fov == doctest::Approx(60.0));
    CHECK(def.pipeline.keyframe_hz == doctest::Approx(1.0));
    CHECK(def.trajectory.speed == doctest::Approx(10.0));

    const Scenario s = parse_scenario(
        "# comment line\n"
        "world.seed = 42\n"
        "world.repetition_zone = 100, 120, 50\n"
        "grid.spacing = 20\n"
        "trajectory.pattern = eight\n"
        "trajectory.length = 880\n"
        "drift.scale_error = 1.03\n"
        "pipeline.filtering = off\n");
    CHECK(s.world.seed == 42);
    REQUIRE(s.world.repetition_zones.size() == 1);
    CHECK(s.world.repetition_zones[0].radius == doctest::Approx(50.0));
    CHECK(s.grid_spacing == doctest::Approx(20.0));
    CHECK(s.trajectory.pattern == Pattern::Eight);
    CHECK(s.drift.scale_error == doctest::Approx(1.03));
    CHECK_FALSE(s.pipeline.filtering_enabled);

    CHECK_THROWS_AS(parse_scenario("bogus.key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("no equals sign\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("grid.spacing = abc\n"), std::invalid_argument);
}

TEST_CASE("seed application is deterministic and spreads across components") {
    Scenario a = parse_scenario("");
    Scenario b = parse_scenario("");
    apply_seed(a, 9);
    apply_seed(b, 9);
    CHECK(a.world.seed == b.world.seed);
    CHECK(a.drift.seed == b.drift.seed);
    CHECK(a.pipeline.seed == b.pipeline.seed);
    Scenario c = parse_scenario("");
    apply_seed(c, 10);
    CHECK(c.world.seed != a.world.seed);
    CHECK(a.world.seed != a.drift.seed);
}

TEST_CASE("pipeline closed loop on an easy scenario") {
    Scenario s = parse_scenario(
        "world.dim = 16\n"
        "world.texture_scale = 10\n"
        "world.features_per_footprint = 64\n"
        "grid.extent_x = 240\n"
        "grid.extent_y = 240\n"
        "vocab.n_c = 8\n"
        "trajectory.length = 500\n"
        "trajectory.loops = 2\n"
        "drift.heading_bias = 0.3\n"
        "drift.scale_error = 1.01\n");
    apply_seed(s, 3);
    const auto grid = s.make_grid();
    const auto vocab = s.make_vocabulary();
    const auto db = s.make_db(grid, vocab);

    const auto res = run_pipeline(s.trajectory, s.world, grid, vocab, db,
                                  s.drift, s.fusion, s.pipeline);
    CHECK(res.diagnostics.keyframes == res.truth.samples.size());
    CHECK(res.diagnostics.achieved_recall_at_1 > 0.8);
    CHECK(res.diagnostics.anchor_count > 0);
    CHECK(res.diagnostics.first_anchor_time >= 0.0);
    CHECK_FALSE(res.estimates.samples.empty());
    CHECK(res.ate_report.mean < 25.0);

    // byte-level determinism of the whole loop
    const auto res2 = run_pipeline(s.trajectory, s.world, grid, vocab, db,
                                   s.drift, s.fusion, s.pipeline);
    REQUIRE(res2.estimates.samples.size() == res.estimates.samples.size());
    for (std::size_t i = 0; i < res.estimates.samples.size(); ++i) {
        CHECK(res2.estimates.samples[i].point.easting ==
              res.estimates.samples[i].point.easting);
        CHECK(res2.estimates.samples[i].point.northing ==
              res.estimates.samples[i].point.northing);
    }
}

TEST_CASE("pipeline rejects a database built against a different vocabulary") {
    Scenario s = parse_scenario(
        "world.dim = 16\nworld.features_per_footprint = 36\n"
        "grid.extent_x = 120\ngrid.extent_y = 120\nvocab.n_c = 4\n");
    apply_seed(s, 1);
    const auto grid = s.make_grid();
    const auto vocab = s.make_vocabulary();
    const auto db = s.make_db(grid, vocab);
    Scenario other = s;
    other.world.seed = 999;
    const auto other_vocab = other.make_vocabulary();
    CHECK_THROWS_AS(run_pipeline(s.trajectory, s.world, grid, other_vocab, db,
                                 s.drift, s.fusion, s.pipeline),
                    std::runtime_error);
}
