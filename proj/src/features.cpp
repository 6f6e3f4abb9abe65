#include "aeroloc/features.hpp"

#include "aeroloc/rng.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aeroloc {

int SyntheticWorld::zone_of(const GeoPoint& p) const {
    for (std::size_t i = 0; i < repetition_zones.size(); ++i) {
        if (p.distance_to(repetition_zones[i].center) <= repetition_zones[i].radius)
            return static_cast<int>(i);
    }
    return -1;
}

namespace {

Eigen::VectorXd random_vector(std::uint64_t seed, std::size_t d) {
    Rng rng(seed);
    Eigen::VectorXd v(d);
    for (std::size_t i = 0; i < d; ++i) v[static_cast<Eigen::Index>(i)] = rng.gaussian();
    return v;
}

/// Texture vector of one lattice cell: a shared dictionary entry blended with
/// a cell-unique direction by the distinctiveness factor.
Eigen::VectorXd cell_vector(const SyntheticWorld& w, std::int64_t cx, std::int64_t cy) {
    const std::uint64_t cell_key =
        hash_combine(w.seed, hash_combine(static_cast<std::uint64_t>(cx) * 0x9e37ULL + 0x51ULL,
                                          static_cast<std::uint64_t>(cy)));
    const std::uint64_t basis_idx = mix64(cell_key) % static_cast<std::uint64_t>(w.n_basis);
    Eigen::VectorXd shared =
        random_vector(hash_combine(w.seed, 0xB4515ULL + basis_idx), w.dim);
    Eigen::VectorXd unique = random_vector(hash_combine(cell_key, 0xCE11ULL), w.dim);
    return (1.0 - w.distinctiveness) * shared + w.distinctiveness * unique;
}

/// Smooth texture field: bilinear blend of the four surrounding cell vectors.
Eigen::VectorXd field_at(const SyntheticWorld& w, double easting, double northing) {
    const double gx = easting / w.texture_scale;
    const double gy = northing / w.texture_scale;
    const auto cx = static_cast<std::int64_t>(std::floor(gx));
    const auto cy = static_cast<std::int64_t>(std::floor(gy));
    const double fx = gx - static_cast<double>(cx);
    const double fy = gy - static_cast<double>(cy);

    Eigen::VectorXd v = (1.0 - fx) * (1.0 - fy) * cell_vector(w, cx, cy) +
                        fx * (1.0 - fy) * cell_vector(w, cx + 1, cy) +
                        (1.0 - fx) * fy * cell_vector(w, cx, cy + 1) +
                        fx * fy * cell_vector(w, cx + 1, cy + 1);
    const double n = v.norm();
    if (n > 1e-12) v /= n;
    return v;
}

struct StyleMap {
    Eigen::MatrixXd rotation;  // orthogonal
    Eigen::VectorXd bias;
};

/// Fixed invertible style shift from Satellite to Camera: a seeded
/// near-identity orthogonal transform (Cayley map of a small skew matrix)
/// plus bias, the same for every feature. Mild enough that descriptors stay
/// comparable across styles, which is the premise of cross-style retrieval.
StyleMap style_map(const SyntheticWorld& w) {
    Rng rng(hash_combine(w.seed, 0x57D1EULL));
    const auto d = static_cast<Eigen::Index>(w.dim);
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.gaussian();
    const Eigen::MatrixXd skew =
        (g - g.transpose()) * (0.15 / (2.0 * std::sqrt(static_cast<double>(w.dim))));
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    StyleMap map;
    map.rotation = (eye + skew) * (eye - skew).inverse();
    map.bias = 0.05 * random_vector(hash_combine(w.seed, 0xB1A5ULL), w.dim);
    return map;
}

}  // namespace

LocalFeatureSet synth_features(const SyntheticWorld& world, const GeoPoint& center,
                               double fov, ImageStyle style, double noise_sigma,
                               std::uint64_t noise_seed) {
    if (fov <= 0.0) throw std::invalid_argument("synth_features: fov must be > 0");
    if (noise_sigma < 0.0) throw std::invalid_argument("synth_features: negative noise");

    // Footprints centered inside a repetition zone alias onto the zone's
    // shared virtual origin, so distinct locations yield the same features.
    GeoPoint effective = center;
    const int zone = world.zone_of(center);
    if (zone >= 0) {
        Rng zrng(hash_combine(world.seed, 0x20E5ULL + static_cast<std::uint64_t>(zone)));
        effective = {1.0e7 + zrng.uniform(0.0, 1.0e5), 1.0e7 + zrng.uniform(0.0, 1.0e5)};
    }

    const auto side = static_cast<std::size_t>(
        std::lround(std::sqrt(static_cast<double>(world.features_per_footprint))));
    const std::size_t n = side * side;

    StyleMap map;
    if (style == ImageStyle::Camera) map = style_map(world);

    Rng noise(hash_combine(noise_seed, 0x4015EULL));

    LocalFeatureSet set;
    set.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(world.dim));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "synth:%.3f,%.3f:%s", center.easting,
                  center.northing, style == ImageStyle::Satellite ? "sat" : "cam");
    set.source_id = buf;

    std::size_t row = 0;
    for (std::size_t j = 0; j < side; ++j) {
        for (std::size_t i = 0; i < side; ++i, ++row) {
            // sample points on a centered grid across the footprint
            const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(side) - 0.5;
            const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(side) - 0.5;
            Eigen::VectorXd f =
                field_at(world, effective.easting + u * fov, effective.northing + v * fov);
            if (style == ImageStyle::Camera) f = map.rotation * f + map.bias;
            if (noise_sigma > 0.0)
                for (Eigen::Index c = 0; c < f.size(); ++c)
                    f[c] += noise_sigma * noise.gaussian();
            set.features.row(static_cast<Eigen::Index>(row)) = f.cast<float>().transpose();
        }
    }
    return set;
}

double footprint_overlap(const GeoPoint& a, const GeoPoint& b, double fov) {
    const double dx = std::max(0.0, fov - std::abs(a.easting - b.easting));
    const double dy = std::max(0.0, fov - std::abs(a.northing - b.northing));
    return (dx * dy) / (fov * fov);
}

namespace {

template <typename T>
void write_le(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("truncated feature file");
    return value;
}

}  // namespace

void save_features(const LocalFeatureSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("FLF1", 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.count()));
    for (Eigen::Index r = 0; r < set.features.rows(); ++r)
        for (Eigen::Index c = 0; c < set.features.cols(); ++c)
            write_le<float>(out, set.features(r, c));
}

LocalFeatureSet load_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FLF1", 4) != 0)
        throw std::runtime_error("bad feature file magic in " + path);
    const auto d = read_le<std::uint32_t>(in);
    const auto n = read_le<std::uint32_t>(in);
    if (d == 0 || n == 0) throw std::runtime_error("empty feature file " + path);
    LocalFeatureSet set;
    set.source_id = path;
    set.features.resize(n, d);
    for (std::uint32_t r = 0; r < n; ++r)
        for (std::uint32_t c = 0; c < d; ++c) set.features(r, c) = read_le<float>(in);
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error("trailing bytes in feature file " + path);
    return set;
}

}  // namespace aeroloc
