#include "aeroloc/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace aeroloc {

namespace {

std::size_t intersection_size(const std::vector<std::uint32_t>& retrieved,
                              const std::vector<std::uint32_t>& gt, std::size_t n) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto end = gt.begin() + static_cast<std::ptrdiff_t>(n);
        if (std::find(gt.begin(), end, retrieved[i]) != end) ++hits;
    }
    return hits;
}

void check_records(const std::vector<EvalRecord>& records, std::size_t n,
                   bool need_gt_n) {
    if (records.empty()) throw std::invalid_argument("metrics: no records");
    for (const auto& r : records) {
        if (r.retrieved_ids.size() < n)
            throw std::invalid_argument("metrics: retrieved list shorter than n");
        if (r.gt_ids.empty()) throw std::invalid_argument("metrics: empty ground truth");
        if (need_gt_n && r.gt_ids.size() < n)
            throw std::invalid_argument("metrics: ground-truth list shorter than n");
    }
}

}  // namespace

double recall_at_n(const std::vector<EvalRecord>& records, std::size_t n) {
    if (n < 1) throw std::invalid_argument("recall_at_n: n must be >= 1");
    check_records(records, n, true);
    std::size_t hits = 0;
    for (const auto& r : records)
        if (intersection_size(r.retrieved_ids, r.gt_ids, n) >= 1) ++hits;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double top_k_at_n(const std::vector<EvalRecord>& records, std::size_t k,
                  std::size_t n) {
    if (k < 1 || k > n) throw std::invalid_argument("top_k_at_n: require 1 <= k <= n");
    check_records(records, n, true);
    std::size_t hits = 0;
    for (const auto& r : records)
        if (intersection_size(r.retrieved_ids, r.gt_ids, n) >= k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace aeroloc
