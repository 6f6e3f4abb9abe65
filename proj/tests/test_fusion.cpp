#include "aeroloc/fusion.hpp"
#include "aeroloc/rng.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace aeroloc;

namespace {

FilterState make_state(const GeoPoint& at, const FusionConfig& cfg) {
    FilterState s;
    initialize(s, at, cfg);
    return s;
}

bool positive_definite(const Eigen::Matrix2d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

TEST_CASE("initialization sets position and covariance from the config") {
    FusionConfig cfg;
    auto s = make_state({100, 200}, cfg);
    CHECK(s.position.easting == doctest::Approx(100.0));
    CHECK(s.position.northing == doctest::Approx(200.0));
    CHECK((s.covariance - cfg.memory_obs_variance * Eigen::Matrix2d::Identity())
              .norm() < 1e-12);
    CHECK(s.initialized);
    CHECK_THROWS_AS(initialize(s, {0, 0}, cfg), std::logic_error);
}

TEST_CASE("operations before initialization throw") {
    FusionConfig cfg;
    FilterState s;
    CHECK_THROWS_AS(predict(s, {1, 0}, cfg), std::logic_error);
    CHECK_THROWS_AS(update_memory(s, {0, 0}, cfg), std::logic_error);
    CHECK_THROWS_AS(update_instant(s, {0, 0}, cfg), std::logic_error);
}

TEST_CASE("predict over a 10 m step with q = 0.01 adds 0.1 I") {
    FusionConfig cfg;
    cfg.process_noise_per_meter = 0.01;
    auto s = make_state({0, 0}, cfg);
    const Eigen::Matrix2d before = s.covariance;
    predict(s, {10, 0}, cfg);
    CHECK(s.position.easting == doctest::Approx(10.0));
    CHECK(s.position.northing == doctest::Approx(0.0));
    CHECK((s.covariance - before - 0.1 * Eigen::Matrix2d::Identity()).norm() <
          1e-12);
}

TEST_CASE("equal prior and observation variance moves halfway") {
    FusionConfig cfg;
    cfg.memory_obs_variance = 100.0;
    auto s = make_state({0, 0}, cfg);  // prior covariance = 100 I
    const bool accepted = update_memory(s, {10, 0}, cfg);
    CHECK(accepted);
    CHECK(s.position.easting == doctest::Approx(5.0));
    CHECK(s.position.northing == doctest::Approx(0.0));
    // posterior variance halves: 1/(1/100 + 1/100) = 50
    CHECK(s.covariance(0, 0) == doctest::Approx(50.0));
    CHECK(s.covariance(1, 1) == doctest::Approx(50.0));
}

TEST_CASE("a far outlier is gated and leaves the state untouched") {
    FusionConfig cfg;
    auto s = make_state({0, 0}, cfg);
    const auto pos_before = s.position;
    const auto cov_before = s.covariance;
    // innovation standard deviation is sqrt(2 * memory_var); place the
    // observation 10 sigma away
    const double sigma = std::sqrt(2.0 * cfg.memory_obs_variance);
    const bool accepted = update_memory(s, {10.0 * sigma, 0}, cfg);
    CHECK_FALSE(accepted);
    CHECK(s.rejected_updates == 1);
    CHECK(s.position.easting == pos_before.easting);
    CHECK(s.position.northing == pos_before.northing);
    CHECK((s.covariance - cov_before).norm() == 0.0);
}

TEST_CASE("gate threshold boundary") {
    FusionConfig cfg;
    cfg.memory_obs_variance = 50.0;
    auto s = make_state({0, 0}, cfg);
    // S = (50 + 50) I; mahalanobis^2 = d^2 / 100; boundary at d = sqrt(921)
    const double boundary = std::sqrt(cfg.gate_threshold * 100.0);
    auto inside = s;
    CHECK(update_memory(inside, {boundary - 1e-6, 0}, cfg));
    auto outside = s;
    CHECK_FALSE(update_memory(outside, {boundary + 1e-6, 0}, cfg));
}

TEST_CASE("covariance stays symmetric positive definite through a long run") {
    FusionConfig cfg;
    Rng rng(11);
    auto s = make_state({0, 0}, cfg);
    for (int step = 0; step < 500; ++step) {
        predict(s, {rng.uniform(-15, 15), rng.uniform(-15, 15)}, cfg);
        const GeoPoint obs{s.position.easting + 10 * rng.gaussian(),
                           s.position.northing + 10 * rng.gaussian()};
        if (step % 3 == 0) update_memory(s, obs, cfg);
        else update_instant(s, obs, cfg);
        CHECK((s.covariance - s.covariance.transpose()).norm() < 1e-12);
        CHECK(positive_definite(s.covariance));
    }
}

TEST_CASE("updates contract the covariance; prediction grows it") {
    FusionConfig cfg;
    auto s = make_state({0, 0}, cfg);
    const double before = s.covariance.trace();
    update_memory(s, {1, 1}, cfg);
    const double after_update = s.covariance.trace();
    CHECK(after_update < before);
    predict(s, {20, 0}, cfg);
    CHECK(s.covariance.trace() > after_update);
}

TEST_CASE("memory and instant update order is numerically insignificant") {
    FusionConfig cfg;
    const GeoPoint anchor{12, -7};
    const GeoPoint vpr{18, -2};
    auto a = make_state({10, -5}, cfg);
    update_memory(a, anchor, cfg);
    update_instant(a, vpr, cfg);
    auto b = make_state({10, -5}, cfg);
    update_instant(b, vpr, cfg);
    update_memory(b, anchor, cfg);
    CHECK(std::abs(a.position.easting - b.position.easting) < 1e-9);
    CHECK(std::abs(a.position.northing - b.position.northing) < 1e-9);
    CHECK((a.covariance - b.covariance).norm() < 1e-9);
}

TEST_CASE("instant observations pull less than memory observations") {
    FusionConfig cfg;  // instant variance is much larger than memory variance
    auto mem = make_state({0, 0}, cfg);
    update_memory(mem, {30, 0}, cfg);
    auto inst = make_state({0, 0}, cfg);
    update_instant(inst, {30, 0}, cfg);
    CHECK(mem.position.easting > inst.position.easting);
    CHECK(inst.position.easting > 0.0);
}

TEST_CASE("repeated consistent observations converge to the observed point") {
    FusionConfig cfg;
    auto s = make_state({0, 0}, cfg);
    for (int i = 0; i < 200; ++i) {
        // alternate the odometry delta so process noise accrues without drift
        predict(s, {i % 2 == 0 ? 0.5 : -0.5, 0}, cfg);
        update_memory(s, {20, 10}, cfg);
    }
    CHECK(s.rejected_updates == 0);
    CHECK(s.position.distance_to({20, 10}) < 1.0);
}
