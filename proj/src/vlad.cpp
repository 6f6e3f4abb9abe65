#include "aeroloc/vlad.hpp"

#include "aeroloc/rng.hpp"

#include <algorithm>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace aeroloc {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Vocabulary::fingerprint() const {
    // hash over the f32 representation so a file round-trip is stable
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto nc = static_cast<std::uint32_t>(n_c());
    const auto dd = static_cast<std::uint32_t>(dim());
    h = fnv1a(&nc, sizeof(nc), h);
    h = fnv1a(&dd, sizeof(dd), h);
    h = fnv1a(&build_seed, sizeof(build_seed), h);
    for (Eigen::Index r = 0; r < centroids.rows(); ++r)
        for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
            const float v = static_cast<float>(centroids(r, c));
            h = fnv1a(&v, sizeof(v), h);
        }
    return h;
}

Vocabulary build_vocabulary(const std::vector<LocalFeatureSet>& feature_sets,
                            std::size_t n_c, std::uint64_t seed,
                            std::size_t max_iters) {
    if (n_c < 2) throw std::invalid_argument("build_vocabulary: n_c must be >= 2");

    std::size_t total = 0;
    Eigen::Index d = -1;
    for (const auto& set : feature_sets) {
        if (set.count() == 0) continue;
        if (d < 0) d = set.features.cols();
        else if (d != set.features.cols())
            throw std::invalid_argument("build_vocabulary: inconsistent feature dimensions");
        total += set.count();
    }
    if (total < n_c)
        throw std::invalid_argument("build_vocabulary: fewer features than clusters");

    // pool everything into one matrix (double precision for the math)
    Eigen::MatrixXd points(static_cast<Eigen::Index>(total), d);
    Eigen::Index row = 0;
    for (const auto& set : feature_sets)
        for (Eigen::Index r = 0; r < set.features.rows(); ++r)
            points.row(row++) = set.features.row(r).cast<double>();

    const auto n = points.rows();
    const auto k = static_cast<Eigen::Index>(n_c);
    Rng rng(hash_combine(seed, 0x63A55ULL));

    // k-means++ seeding
    Eigen::MatrixXd centroids(k, d);
    std::vector<double> d2(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::max());
    centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));
    for (Eigen::Index c = 1; c < k; ++c) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dist = (points.row(i) - centroids.row(c - 1)).squaredNorm();
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], dist);
            sum += d2[static_cast<std::size_t>(i)];
        }
        double target = rng.uniform01() * sum;
        Eigen::Index chosen = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            target -= d2[static_cast<std::size_t>(i)];
            if (target <= 0.0) {
                chosen = i;
                break;
            }
        }
        centroids.row(c) = points.row(chosen);
    }

    std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), -1);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    double inertia = 0.0;

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
            for (Eigen::Index c = 1; c < k; ++c) {
                const double dist = (points.row(i) - centroids.row(c)).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            inertia += best_d;
            if (assign[static_cast<std::size_t>(i)] != best) {
                assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed) break;

        std::fill(sizes.begin(), sizes.end(), 0);
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
            ++sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
        }
        for (Eigen::Index c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) =
                    sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
            } else {
                // reseed an empty cluster to the point farthest from its centroid
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double dist =
                        (points.row(i) - centroids.row(assign[static_cast<std::size_t>(i)]))
                            .squaredNorm();
                    if (dist > far_d) {
                        far_d = dist;
                        far = i;
                    }
                }
                centroids.row(c) = points.row(far);
            }
        }
    }

    // final stats with assignments recomputed against the final centroids
    std::fill(sizes.begin(), sizes.end(), 0);
    inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
        for (Eigen::Index c = 1; c < k; ++c) {
            const double dist = (points.row(i) - centroids.row(c)).squaredNorm();
            if (dist < best_d) {
                best_d = dist;
                best = c;
            }
        }
        inertia += best_d;
        ++sizes[static_cast<std::size_t>(best)];
    }

    Vocabulary vocab;
    vocab.centroids = centroids;
    vocab.build_seed = seed;
    vocab.final_inertia = inertia;
    vocab.cluster_sizes = sizes;
    return vocab;
}

VladDescriptor encode(const LocalFeatureSet& features, const Vocabulary& vocab) {
    if (features.dim() != vocab.dim())
        throw std::invalid_argument("encode: feature/vocabulary dimension mismatch");

    const auto k = static_cast<Eigen::Index>(vocab.n_c());
    const auto d = static_cast<Eigen::Index>(vocab.dim());

    // gather per-cluster members and sum residuals in a canonical order, so
    // the result is exactly invariant to the input feature ordering
    std::vector<std::vector<Eigen::VectorXd>> members(static_cast<std::size_t>(k));
    for (Eigen::Index r = 0; r < features.features.rows(); ++r) {
        const Eigen::VectorXd x = features.features.row(r).cast<double>().transpose();
        Eigen::Index best = 0;
        double best_d = (x.transpose() - vocab.centroids.row(0)).squaredNorm();
        for (Eigen::Index c = 1; c < k; ++c) {
            const double dist = (x.transpose() - vocab.centroids.row(c)).squaredNorm();
            if (dist < best_d) {
                best_d = dist;
                best = c;
            }
        }
        members[static_cast<std::size_t>(best)].push_back(x);
    }

    Eigen::MatrixXd residuals = Eigen::MatrixXd::Zero(k, d);
    for (Eigen::Index c = 0; c < k; ++c) {
        auto& group = members[static_cast<std::size_t>(c)];
        std::sort(group.begin(), group.end(),
                  [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                      return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                                          b.data(), b.data() + b.size());
                  });
        for (const auto& x : group)
            residuals.row(c) += x.transpose() - vocab.centroids.row(c);
    }

    VladDescriptor desc;
    desc.n_c = vocab.n_c();
    desc.d = vocab.dim();
    desc.values.resize(k * d);
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::VectorXd block = residuals.row(c).transpose();
        const double bn = block.norm();
        if (bn > 0.0) block /= bn;  // intra-normalization; empty blocks stay zero
        desc.values.segment(c * d, d) = block;
    }
    const double gn = desc.values.norm();
    if (gn > 0.0) {
        desc.values /= gn;
    } else {
        desc.degenerate = true;
    }
    return desc;
}

double similarity(const VladDescriptor& a, const VladDescriptor& b) {
    if (a.n_c != b.n_c || a.d != b.d)
        throw std::invalid_argument("similarity: descriptor shape mismatch");
    if (a.degenerate || b.degenerate) return 0.0;
    return a.values.dot(b.values);
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
    if (!in) throw std::runtime_error("truncated vocabulary file");
    return value;
}

}  // namespace

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("FLVB", 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.n_c()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.dim()));
    write_le<std::uint64_t>(out, vocab.build_seed);
    for (Eigen::Index r = 0; r < vocab.centroids.rows(); ++r)
        for (Eigen::Index c = 0; c < vocab.centroids.cols(); ++c)
            write_le<float>(out, static_cast<float>(vocab.centroids(r, c)));
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FLVB", 4) != 0)
        throw std::runtime_error("bad vocabulary magic in " + path);
    const auto n_c = read_le<std::uint32_t>(in);
    const auto d = read_le<std::uint32_t>(in);
    Vocabulary vocab;
    vocab.build_seed = read_le<std::uint64_t>(in);
    vocab.centroids.resize(n_c, d);
    for (std::uint32_t r = 0; r < n_c; ++r)
        for (std::uint32_t c = 0; c < d; ++c)
            vocab.centroids(r, c) = static_cast<double>(read_le<float>(in));
    return vocab;
}

}  // namespace aeroloc
