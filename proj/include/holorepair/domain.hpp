#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "holorepair/dataset.hpp"

namespace holorepair {

/// Pair and unary value counts over the initial (non-NULL) cell values,
/// counted per tuple. Built once, then read-only.
class CoocTable {
public:
    static CoocTable build(const Dataset& dataset);

    int unary_count(int col, const std::string& v) const;
    int pair_count(int col_a, const std::string& va, int col_b, const std::string& vb) const;

    /// Pr[v | cond] = #(v, cond) / #cond. Throws when #cond == 0 (undefined
    /// conditional; callers skip such co-cells).
    double cooc_prob(int col_v, const std::string& v, int col_cond,
                     const std::string& cond) const;

private:
    int cols_ = 0;
    // unary_[a][v]; pairs_[a * cols_ + b][va][vb] stored for a < b only
    std::vector<std::unordered_map<std::string, int>> unary_;
    std::vector<std::unordered_map<std::string, std::unordered_map<std::string, int>>> pairs_;
};

/// Ordered repair candidates for one cell: descending max co-occurrence
/// probability over the cell's co-cells, ties lexicographic.
struct CandidateDomain {
    Cell cell;
    std::vector<std::string> candidates;
    int initial_index = -1;  // position of the initial value, -1 when NULL

    int index_of(const std::string& v) const {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (candidates[i] == v) return static_cast<int>(i);
        return -1;
    }
};

using DomainMap = std::unordered_map<Cell, CandidateDomain, CellHash>;

/// Candidate discovery: for each noisy cell, collect every active-domain
/// value whose conditional probability given some non-NULL co-cell clears
/// tau, then add the initial value. Cells with NULL initial value and no
/// surviving candidate fall back to the most frequent active-domain values,
/// capped.
DomainMap prune_domain(const Dataset& dataset, const CoocTable& table,
                       const std::vector<Cell>& noisy, double tau);

/// Candidate set for a single cell; prune_domain applies this per noisy
/// cell, and training-example construction reuses it for clean cells.
CandidateDomain candidates_for_cell(const Dataset& dataset, const CoocTable& table, Cell cell,
                                    double tau);

/// Max conditional probability of `v` over the cell's non-NULL co-cells;
/// 0 when every co-cell is NULL. This is the candidate-ordering key.
double max_cooc_prob(const Dataset& dataset, const CoocTable& table, Cell cell,
                     const std::string& v);

inline constexpr int kNullDomainCap = 50;

}  // namespace holorepair
