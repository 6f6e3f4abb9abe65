#include "aeroloc/tile_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aeroloc {

const TileRecord& TileGrid::by_id(std::uint32_t id) const {
    for (const auto& t : tiles)
        if (t.tile_id == id) return t;
    throw std::out_of_range("unknown tile_id " + std::to_string(id));
}

TileGrid build_grid(const GeoPoint& origin, double extent_x, double extent_y,
                    double spacing, double fov) {
    if (extent_x <= 0.0 || extent_y <= 0.0 || spacing <= 0.0 || fov <= 0.0)
        throw std::invalid_argument("build_grid: non-positive parameter");

    TileGrid grid;
    grid.spacing = spacing;
    grid.origin = origin;
    grid.extent_x = extent_x;
    grid.extent_y = extent_y;

    const auto nx = static_cast<std::size_t>(std::floor(extent_x / spacing)) + 1;
    const auto ny = static_cast<std::size_t>(std::floor(extent_y / spacing)) + 1;
    std::uint32_t id = 0;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            TileRecord rec;
            rec.tile_id = id++;
            rec.center = {origin.easting + static_cast<double>(i) * spacing,
                          origin.northing + static_cast<double>(j) * spacing};
            rec.fov = fov;
            grid.tiles.push_back(rec);
        }
    }
    return grid;
}

double overlap_fraction(const TileGrid& grid) {
    if (grid.tiles.empty()) throw std::invalid_argument("overlap_fraction: empty grid");
    const double fov = grid.tiles.front().fov;
    if (fov < grid.spacing) return 0.0;
    return (fov - grid.spacing) / fov;
}

std::vector<std::uint32_t> ground_truth_neighbors(const TileGrid& grid,
                                                  const GeoPoint& q, std::size_t n) {
    if (grid.tiles.empty()) throw std::invalid_argument("ground_truth_neighbors: empty grid");
    if (n < 1 || n > grid.tiles.size())
        throw std::invalid_argument("ground_truth_neighbors: bad n");

    std::vector<std::pair<double, std::uint32_t>> dist;
    dist.reserve(grid.tiles.size());
    for (const auto& t : grid.tiles)
        dist.emplace_back(q.distance_to(t.center), t.tile_id);
    std::sort(dist.begin(), dist.end());

    std::vector<std::uint32_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(dist[i].second);
    return out;
}

double nearest_tile_error_bound(const TileGrid& grid) {
    return grid.spacing / 2.0;
}

void save_tile_manifest(const TileGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "tile_id,easting,northing,fov_m\n";
    out.precision(17);
    for (const auto& t : grid.tiles)
        out << t.tile_id << ',' << t.center.easting << ',' << t.center.northing
            << ',' << t.fov << '\n';
}

TileGrid load_tile_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    TileGrid grid;
    double min_e = std::numeric_limits<double>::max();
    double min_n = std::numeric_limits<double>::max();
    double max_e = std::numeric_limits<double>::lowest();
    double max_n = std::numeric_limits<double>::lowest();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4) throw std::runtime_error("bad manifest row in " + path);
        TileRecord rec;
        rec.tile_id = static_cast<std::uint32_t>(std::stoul(cells[0]));
        rec.center = {std::stod(cells[1]), std::stod(cells[2])};
        rec.fov = std::stod(cells[3]);
        min_e = std::min(min_e, rec.center.easting);
        min_n = std::min(min_n, rec.center.northing);
        max_e = std::max(max_e, rec.center.easting);
        max_n = std::max(max_n, rec.center.northing);
        grid.tiles.push_back(rec);
    }
    if (grid.tiles.empty()) throw std::runtime_error("empty manifest " + path);

    grid.origin = {min_e, min_n};
    grid.extent_x = max_e - min_e;
    grid.extent_y = max_n - min_n;
    // recover spacing as the smallest positive center separation along easting
    double spacing = std::numeric_limits<double>::max();
    for (const auto& t : grid.tiles) {
        const double de = t.center.easting - min_e;
        if (de > 1e-9) spacing = std::min(spacing, de);
    }
    grid.spacing = (spacing == std::numeric_limits<double>::max()) ? 1.0 : spacing;
    return grid;
}

}  // namespace aeroloc
