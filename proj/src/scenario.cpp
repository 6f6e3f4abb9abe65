#include "aeroloc/scenario.hpp"

#include "aeroloc/rng.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aeroloc {

TileGrid Scenario::make_grid() const {
    return build_grid(grid_origin, grid_extent_x, grid_extent_y, grid_spacing,
                      grid_fov);
}

Vocabulary Scenario::make_vocabulary() const {
    // train on Satellite features from a deterministic tile subsample
    const TileGrid grid = make_grid();
    std::vector<LocalFeatureSet> sets;
    const std::size_t stride =
        std::max<std::size_t>(1, grid.tiles.size() / std::max<std::size_t>(1, vocab_train_tiles));
    for (std::size_t i = 0; i < grid.tiles.size(); i += stride)
        sets.push_back(synth_features(world, grid.tiles[i].center, grid_fov,
                                      ImageStyle::Satellite, 0.0));
    return build_vocabulary(sets, vocab_n_c, world.seed);
}

DescriptorDb Scenario::make_db(const TileGrid& grid, const Vocabulary& vocab) const {
    const SyntheticWorld& w = world;
    const double fov = grid_fov;
    return db_build(grid, vocab, [&w, fov](const TileRecord& tile) {
        return synth_features(w, tile.center, fov, ImageStyle::Satellite, 0.0);
    });
}

void apply_seed(Scenario& s, std::uint64_t seed) {
    s.world.seed = hash_combine(seed, 0x1D0ULL);
    s.drift.seed = hash_combine(seed, 0xD21F7ULL);
    s.pipeline.seed = hash_combine(seed, 0x5117ULL);
}

namespace {

Pattern parse_pattern(const std::string& v) {
    if (v == "eight") return Pattern::Eight;
    if (v == "rectangle") return Pattern::Rectangle;
    if (v == "lawnmower") return Pattern::Lawnmower;
    if (v == "custom") return Pattern::Custom;
    throw std::invalid_argument("scenario: unknown pattern '" + v + "'");
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw std::invalid_argument("scenario: bad boolean for key '" + key + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        // skip blank lines
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("scenario: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "world.seed") s.world.seed = std::stoull(value);
            else if (key == "world.texture_scale") s.world.texture_scale = std::stod(value);
            else if (key == "world.n_basis") s.world.n_basis = std::stoul(value);
            else if (key == "world.distinctiveness") s.world.distinctiveness = std::stod(value);
            else if (key == "world.dim") s.world.dim = std::stoul(value);
            else if (key == "world.features_per_footprint")
                s.world.features_per_footprint = std::stoul(value);
            else if (key == "world.repetition_zone") {
                // easting,northing,radius
                std::stringstream zs(value);
                std::string cell;
                std::vector<double> v;
                while (std::getline(zs, cell, ',')) v.push_back(std::stod(cell));
                if (v.size() != 3)
                    throw std::invalid_argument("expected easting,northing,radius");
                s.world.repetition_zones.push_back({{v[0], v[1]}, v[2]});
            }
            else if (key == "grid.origin_easting") s.grid_origin.easting = std::stod(value);
            else if (key == "grid.origin_northing") s.grid_origin.northing = std::stod(value);
            else if (key == "grid.extent_x") s.grid_extent_x = std::stod(value);
            else if (key == "grid.extent_y") s.grid_extent_y = std::stod(value);
            else if (key == "grid.spacing") s.grid_spacing = std::stod(value);
            else if (key == "grid.fov") s.grid_fov = std::stod(value);
            else if (key == "vocab.n_c") s.vocab_n_c = std::stoul(value);
            else if (key == "vocab.train_tiles") s.vocab_train_tiles = std::stoul(value);
            else if (key == "trajectory.pattern") s.trajectory.pattern = parse_pattern(value);
            else if (key == "trajectory.length") s.trajectory.length = std::stod(value);
            else if (key == "trajectory.speed") s.trajectory.speed = std::stod(value);
            else if (key == "trajectory.altitude") s.trajectory.altitude = std::stod(value);
            else if (key == "trajectory.loops") s.trajectory.loops = std::stoul(value);
            else if (key == "drift.heading_bias") s.drift.heading_bias = std::stod(value);
            else if (key == "drift.heading_random_walk")
                s.drift.heading_random_walk = std::stod(value);
            else if (key == "drift.scale_error") s.drift.scale_error = std::stod(value);
            else if (key == "drift.position_noise") s.drift.position_noise = std::stod(value);
            else if (key == "drift.seed") s.drift.seed = std::stoull(value);
            else if (key == "fusion.process_noise_per_meter")
                s.fusion.process_noise_per_meter = std::stod(value);
            else if (key == "fusion.memory_obs_variance")
                s.fusion.memory_obs_variance = std::stod(value);
            else if (key == "fusion.instant_obs_variance")
                s.fusion.instant_obs_variance = std::stod(value);
            else if (key == "fusion.gate_threshold") s.fusion.gate_threshold = std::stod(value);
            else if (key == "pipeline.keyframe_hz") s.pipeline.keyframe_hz = std::stod(value);
            else if (key == "pipeline.retrieval_k") s.pipeline.retrieval_k = std::stoul(value);
            else if (key == "pipeline.dbscan_eps") s.pipeline.dbscan_eps = std::stod(value);
            else if (key == "pipeline.dbscan_min_pts")
                s.pipeline.dbscan_min_pts = std::stoul(value);
            else if (key == "pipeline.window_capacity")
                s.pipeline.window_capacity = std::stoul(value);
            else if (key == "pipeline.min_window_pairs")
                s.pipeline.min_window_pairs = std::stoul(value);
            else if (key == "pipeline.min_window_extent")
                s.pipeline.min_window_extent = std::stod(value);
            else if (key == "pipeline.feature_noise_sigma")
                s.pipeline.feature_noise_sigma = std::stod(value);
            else if (key == "pipeline.false_positive_rate")
                s.pipeline.false_positive_rate = std::stod(value);
            else if (key == "pipeline.filtering")
                s.pipeline.filtering_enabled = parse_bool(value, key);
            else if (key == "pipeline.seed") s.pipeline.seed = std::stoull(value);
            else
                throw std::invalid_argument("scenario: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("scenario: bad value for key '" + key + "'");
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace aeroloc
