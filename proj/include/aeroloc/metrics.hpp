#pragma once

#include <cstdint>
#include <vector>

namespace aeroloc {

/// One query's retrieval ranking paired with its geographic ground truth
/// (tile ids sorted by ascending distance to the query position).
struct EvalRecord {
    std::uint64_t query_id = 0;
    std::vector<std::uint32_t> retrieved_ids;
    std::vector<std::uint32_t> gt_ids;
};

/// Fraction of queries whose top-n retrievals intersect GT_n. The positive
/// set is the n geographically closest tiles, the same set Top-k@N uses.
double recall_at_n(const std::vector<EvalRecord>& records, std::size_t n);

/// Fraction of queries with |Retrieved_N ∩ GT_N| >= k.
double top_k_at_n(const std::vector<EvalRecord>& records, std::size_t k,
                  std::size_t n);

}  // namespace aeroloc
