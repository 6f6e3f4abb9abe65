#pragma once

#include "aeroloc/geo.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace aeroloc {

/// One reference tile: a square ground footprint whose center is the
/// georeference position stored in the database.
struct TileRecord {
    std::uint32_t tile_id = 0;
    GeoPoint center;
    double fov = 0.0;  // side length of the square footprint, meters
};

/// Regular lattice of reference tiles covering the area of interest.
struct TileGrid {
    std::vector<TileRecord> tiles;
    double spacing = 0.0;
    GeoPoint origin;
    double extent_x = 0.0;
    double extent_y = 0.0;

    const TileRecord& by_id(std::uint32_t id) const;
};

TileGrid build_grid(const GeoPoint& origin, double extent_x, double extent_y,
                    double spacing, double fov);

/// Fraction of a tile's footprint shared with an adjacent tile along one axis.
double overlap_fraction(const TileGrid& grid);

/// Tile ids sorted by ascending distance from q; ties by ascending id.
std::vector<std::uint32_t> ground_truth_neighbors(const TileGrid& grid,
                                                  const GeoPoint& q, std::size_t n);

/// Worst-case per-axis distance from an in-extent point to the nearest
/// tile center: spacing / 2. The Euclidean lattice worst case is larger,
/// spacing * sqrt(2) / 2.
double nearest_tile_error_bound(const TileGrid& grid);

// Manifest CSV: tile_id,easting,northing,fov_m
void save_tile_manifest(const TileGrid& grid, const std::string& path);
TileGrid load_tile_manifest(const std::string& path);

}  // namespace aeroloc
