#include "aeroloc/features.hpp"
#include "aeroloc/rng.hpp"
#include "aeroloc/vlad.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace aeroloc;

namespace {

SyntheticWorld test_world(std::uint64_t seed = 123) {
    SyntheticWorld w;
    w.seed = seed;
    w.texture_scale = 20.0;
    w.dim = 32;
    w.features_per_footprint = 64;
    return w;
}

}  // namespace

TEST_CASE("synthetic features are deterministic with zero noise") {
    const auto w = test_world();
    const auto a = synth_features(w, {100, 200}, 60, ImageStyle::Satellite, 0.0);
    const auto b = synth_features(w, {100, 200}, 60, ImageStyle::Satellite, 0.0);
    CHECK(a.features == b.features);
    CHECK(a.count() == 64);
    CHECK(a.dim() == 32);

    // a different seed gives a different world
    auto w2 = test_world(99);
    const auto c = synth_features(w2, {100, 200}, 60, ImageStyle::Satellite, 0.0);
    CHECK(a.features != c.features);
}

TEST_CASE("style shift preserves feature-cloud geometry") {
    const auto w = test_world();
    const auto sat = synth_features(w, {50, 50}, 60, ImageStyle::Satellite, 0.0);
    const auto cam = synth_features(w, {50, 50}, 60, ImageStyle::Camera, 0.0);
    REQUIRE(sat.count() == cam.count());
    CHECK(sat.features != cam.features);

    // orthogonal map plus bias: pairwise distances survive the style shift
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = i + 1; j < 10; ++j) {
            const double ds = (sat.features.row(i) - sat.features.row(j)).norm();
            const double dc = (cam.features.row(i) - cam.features.row(j)).norm();
            CHECK(ds == doctest::Approx(dc).epsilon(1e-4));
        }
    }
}

TEST_CASE("repetition zones alias distinct locations") {
    auto w = test_world();
    w.repetition_zones.push_back({{1000, 1000}, 80.0});

    std::vector<LocalFeatureSet> sets;
    sets.push_back(synth_features(w, {0, 0}, 60, ImageStyle::Satellite, 0.0));
    sets.push_back(synth_features(w, {80, 40}, 60, ImageStyle::Satellite, 0.0));
    const auto vocab = build_vocabulary(sets, 4, 7);

    const auto in_zone_a = synth_features(w, {980, 1010}, 60, ImageStyle::Satellite, 0.0);
    const auto in_zone_b = synth_features(w, {1040, 960}, 60, ImageStyle::Satellite, 0.0);
    const double sim =
        similarity(encode(in_zone_a, vocab), encode(in_zone_b, vocab));
    CHECK(sim > 0.99);

    // outside the zone, nearby but distinct footprints are not near-identical
    const auto out_a = synth_features(w, {0, 0}, 60, ImageStyle::Satellite, 0.0);
    const auto out_b = synth_features(w, {200, 200}, 60, ImageStyle::Satellite, 0.0);
    CHECK(similarity(encode(out_a, vocab), encode(out_b, vocab)) < 0.99);
}

TEST_CASE("noise perturbs features at the requested scale") {
    const auto w = test_world();
    const auto clean = synth_features(w, {10, 10}, 60, ImageStyle::Satellite, 0.0);
    const auto noisy = synth_features(w, {10, 10}, 60, ImageStyle::Satellite, 0.05, 3);
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (Eigen::Index r = 0; r < clean.features.rows(); ++r)
        for (Eigen::Index c = 0; c < clean.features.cols(); ++c) {
            const double d = noisy.features(r, c) - clean.features(r, c);
            sum_sq += d * d;
            ++count;
        }
    const double rms = std::sqrt(sum_sq / static_cast<double>(count));
    CHECK(rms == doctest::Approx(0.05).epsilon(0.15));
}

TEST_CASE("feature file round trip is bitwise exact") {
    const auto w = test_world();
    const auto set = synth_features(w, {5, -7}, 60, ImageStyle::Camera, 0.01, 9);
    const auto dir = std::filesystem::temp_directory_path() / "aeroloc_feat_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "f.bin").string();
    save_features(set, path);
    const auto loaded = load_features(path);
    REQUIRE(loaded.count() == set.count());
    REQUIRE(loaded.dim() == set.dim());
    CHECK(loaded.features == set.features);
}

TEST_CASE("feature file error paths") {
    const auto dir = std::filesystem::temp_directory_path() / "aeroloc_feat_test";
    std::filesystem::create_directories(dir);

    {
        std::ofstream bad((dir / "bad_magic.bin").string(), std::ios::binary);
        bad << "NOPE";
    }
    CHECK_THROWS_AS(load_features((dir / "bad_magic.bin").string()),
                    std::runtime_error);

    {
        // header promises 3x2 floats, file is short one row
        std::ofstream trunc((dir / "trunc.bin").string(), std::ios::binary);
        trunc << "FLF1";
        const std::uint32_t d = 3, n = 2;
        trunc.write(reinterpret_cast<const char*>(&d), 4);
        trunc.write(reinterpret_cast<const char*>(&n), 4);
        const float v = 1.0f;
        for (int i = 0; i < 3; ++i) trunc.write(reinterpret_cast<const char*>(&v), 4);
    }
    CHECK_THROWS_AS(load_features((dir / "trunc.bin").string()), std::runtime_error);

    {
        std::ofstream empty((dir / "empty.bin").string(), std::ios::binary);
        empty << "FLF1";
        const std::uint32_t zero = 0;
        empty.write(reinterpret_cast<const char*>(&zero), 4);
        empty.write(reinterpret_cast<const char*>(&zero), 4);
    }
    CHECK_THROWS_AS(load_features((dir / "empty.bin").string()), std::runtime_error);
}

TEST_CASE("footprint overlap geometry") {
    CHECK(footprint_overlap({0, 0}, {0, 0}, 60) == doctest::Approx(1.0));
    CHECK(footprint_overlap({0, 0}, {60, 0}, 60) == doctest::Approx(0.0));
    CHECK(footprint_overlap({0, 0}, {30, 0}, 60) == doctest::Approx(0.5));
}

TEST_CASE("descriptor similarity is rank-correlated with footprint overlap") {
    const auto w = test_world(2024);

    std::vector<LocalFeatureSet> train;
    Rng trng(55);
    for (int i = 0; i < 12; ++i)
        train.push_back(synth_features(w, {trng.uniform(0, 400), trng.uniform(0, 400)},
                                       60, ImageStyle::Satellite, 0.0));
    const auto vocab = build_vocabulary(train, 8, 3);

    const GeoPoint base{200, 200};
    const auto base_desc =
        encode(synth_features(w, base, 60, ImageStyle::Satellite, 0.0), vocab);

    Rng rng(17);
    std::vector<double> overlaps, sims;
    for (int i = 0; i < 120; ++i) {
        const GeoPoint other{base.easting + rng.uniform(-70, 70),
                             base.northing + rng.uniform(-70, 70)};
        overlaps.push_back(footprint_overlap(base, other, 60));
        sims.push_back(similarity(
            base_desc,
            encode(synth_features(w, other, 60, ImageStyle::Satellite, 0.0), vocab)));
    }

    // Spearman rank correlation
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    const auto ro = ranks(overlaps);
    const auto rs = ranks(sims);
    const double n = static_cast<double>(ro.size());
    double mean = (n - 1.0) / 2.0, num = 0.0, den_a = 0.0, den_b = 0.0;
    for (std::size_t i = 0; i < ro.size(); ++i) {
        num += (ro[i] - mean) * (rs[i] - mean);
        den_a += (ro[i] - mean) * (ro[i] - mean);
        den_b += (rs[i] - mean) * (rs[i] - mean);
    }
    const double spearman = num / std::sqrt(den_a * den_b);
    CHECK(spearman > 0.8);
}
