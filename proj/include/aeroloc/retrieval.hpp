#pragma once

#include "aeroloc/tile_grid.hpp"
#include "aeroloc/vlad.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace aeroloc {

/// Descriptor database over the tile grid; ordering matches the manifest.
struct DescriptorDb {
    std::vector<std::uint32_t> tile_ids;
    std::vector<GeoPoint> positions;
    std::vector<VladDescriptor> descriptors;
    std::uint64_t vocab_fingerprint = 0;
    std::size_t n_c = 0;
    std::size_t d = 0;

    std::size_t size() const { return tile_ids.size(); }
};

struct Match {
    std::uint32_t tile_id = 0;
    double similarity = 0.0;
    GeoPoint position;
};

struct RetrievalResult {
    std::vector<Match> matches;  // similarity non-increasing
    std::string query_id;
};

using FeatureSource = std::function<LocalFeatureSet(const TileRecord&)>;

/// One Satellite-style descriptor per tile, in manifest order.
DescriptorDb db_build(const TileGrid& grid, const Vocabulary& vocab,
                      const FeatureSource& provider);

/// Exact top-k by cosine similarity; ties broken by ascending tile_id.
RetrievalResult query_topk(const DescriptorDb& db, const VladDescriptor& q,
                           std::size_t k, const std::string& query_id = {});

/// Throws when the database was built against a different vocabulary.
void ensure_vocab(const DescriptorDb& db, const Vocabulary& vocab);

// Database file: magic "FLDB", u32 n_c, u32 d, u64 vocab_fingerprint,
// u32 count, then per entry u32 tile_id, f64 easting, f64 northing,
// n_c*d f32 descriptor. Little-endian throughout.
void save_db(const DescriptorDb& db, const std::string& path);
DescriptorDb load_db(const std::string& path);

}  // namespace aeroloc
