#pragma once

#include "aeroloc/features.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace aeroloc {

/// K-means cluster centers defining the VLAD assignment space.
struct Vocabulary {
    Eigen::MatrixXd centroids;  // n_c x d
    std::uint64_t build_seed = 0;
    double final_inertia = 0.0;
    std::vector<std::size_t> cluster_sizes;

    std::size_t n_c() const { return static_cast<std::size_t>(centroids.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(centroids.cols()); }

    /// Content hash of (n_c, d, seed, centroid bytes); stored in descriptor
    /// databases so stale queries fail fast.
    std::uint64_t fingerprint() const;
};

/// Unit-norm aggregated image descriptor of length n_c * d. A descriptor
/// whose residuals all cancel is representable and flagged degenerate.
struct VladDescriptor {
    Eigen::VectorXd values;
    std::size_t n_c = 0;
    std::size_t d = 0;
    bool degenerate = false;
};

/// Lloyd's k-means with k-means++ seeding; empty clusters are reseeded to the
/// point farthest from its assigned centroid. Deterministic for a fixed seed.
Vocabulary build_vocabulary(const std::vector<LocalFeatureSet>& feature_sets,
                            std::size_t n_c, std::uint64_t seed,
                            std::size_t max_iters = 100);

/// Hard-assignment VLAD: per-cluster residual sums, intra-normalized per
/// block, then globally L2-normalized.
VladDescriptor encode(const LocalFeatureSet& features, const Vocabulary& vocab);

/// Cosine similarity; degenerate descriptors compare as 0.
double similarity(const VladDescriptor& a, const VladDescriptor& b);

// Vocabulary file: magic "FLVB", u32 n_c, u32 d, u64 seed, n_c*d f32 LE.
void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

}  // namespace aeroloc
