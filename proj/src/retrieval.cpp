#include "aeroloc/retrieval.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aeroloc {

DescriptorDb db_build(const TileGrid& grid, const Vocabulary& vocab,
                      const FeatureSource& provider) {
    if (grid.tiles.empty()) throw std::invalid_argument("db_build: empty grid");

    DescriptorDb db;
    db.vocab_fingerprint = vocab.fingerprint();
    db.n_c = vocab.n_c();
    db.d = vocab.dim();
    for (const auto& tile : grid.tiles) {
        LocalFeatureSet features;
        try {
            features = provider(tile);
        } catch (const std::exception& e) {
            throw std::runtime_error("db_build: provider failed for tile " +
                                     std::to_string(tile.tile_id) + ": " + e.what());
        }
        db.tile_ids.push_back(tile.tile_id);
        db.positions.push_back(tile.center);
        db.descriptors.push_back(encode(features, vocab));
    }
    return db;
}

RetrievalResult query_topk(const DescriptorDb& db, const VladDescriptor& q,
                           std::size_t k, const std::string& query_id) {
    if (db.size() == 0) throw std::invalid_argument("query_topk: empty database");
    if (k < 1) throw std::invalid_argument("query_topk: k must be >= 1");
    if (q.n_c != db.n_c || q.d != db.d)
        throw std::invalid_argument("query_topk: descriptor shape mismatch");

    struct Scored {
        double sim;
        std::uint32_t id;
        std::size_t idx;
    };
    std::vector<Scored> scored;
    scored.reserve(db.size());
    for (std::size_t i = 0; i < db.size(); ++i)
        scored.push_back({similarity(q, db.descriptors[i]), db.tile_ids[i], i});
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.id < b.id;
    });

    RetrievalResult result;
    result.query_id = query_id;
    const std::size_t take = std::min(k, db.size());
    for (std::size_t i = 0; i < take; ++i)
        result.matches.push_back(
            {scored[i].id, scored[i].sim, db.positions[scored[i].idx]});
    return result;
}

void ensure_vocab(const DescriptorDb& db, const Vocabulary& vocab) {
    if (db.vocab_fingerprint != vocab.fingerprint())
        throw std::runtime_error(
            "database was built against a different vocabulary (fingerprint mismatch)");
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
    if (!in) throw std::runtime_error("truncated database file");
    return value;
}

}  // namespace

void save_db(const DescriptorDb& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("FLDB", 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(db.n_c));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(db.d));
    write_le<std::uint64_t>(out, db.vocab_fingerprint);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(db.size()));
    for (std::size_t i = 0; i < db.size(); ++i) {
        write_le<std::uint32_t>(out, db.tile_ids[i]);
        write_le<double>(out, db.positions[i].easting);
        write_le<double>(out, db.positions[i].northing);
        for (Eigen::Index c = 0; c < db.descriptors[i].values.size(); ++c)
            write_le<float>(out, static_cast<float>(db.descriptors[i].values[c]));
    }
}

DescriptorDb load_db(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FLDB", 4) != 0)
        throw std::runtime_error("bad database magic in " + path);
    DescriptorDb db;
    db.n_c = read_le<std::uint32_t>(in);
    db.d = read_le<std::uint32_t>(in);
    db.vocab_fingerprint = read_le<std::uint64_t>(in);
    const auto count = read_le<std::uint32_t>(in);
    if (count == 0) throw std::runtime_error("empty database " + path);
    const auto len = static_cast<Eigen::Index>(db.n_c * db.d);
    for (std::uint32_t i = 0; i < count; ++i) {
        db.tile_ids.push_back(read_le<std::uint32_t>(in));
        const double e = read_le<double>(in);
        const double n = read_le<double>(in);
        db.positions.push_back({e, n});
        VladDescriptor desc;
        desc.n_c = db.n_c;
        desc.d = db.d;
        desc.values.resize(len);
        for (Eigen::Index c = 0; c < len; ++c)
            desc.values[c] = static_cast<double>(read_le<float>(in));
        desc.degenerate = desc.values.norm() == 0.0;
        db.descriptors.push_back(std::move(desc));
    }
    return db;
}

}  // namespace aeroloc
