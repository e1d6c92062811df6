#pragma once

#include <unordered_set>
#include <vector>

#include "holorepair/constraints.hpp"
#include "holorepair/dataset.hpp"

namespace holorepair {

/// A constraint with attribute names resolved to columns of one dataset.
struct BoundPredicate {
    Op op = Op::EQ;
    // col >= 0: cell operand (slot, col); col < 0: constant
    int lhs_slot = -1, lhs_col = -1;
    int rhs_slot = -1, rhs_col = -1;
    Value lhs_const, rhs_const;
};

struct BoundConstraint {
    int index = -1;
    int arity = 2;
    std::vector<BoundPredicate> preds;
    std::vector<std::pair<int, int>> cell_refs;  // (slot, col), sorted, deduped
    int join_lhs_col = -1;  // first EQ predicate between t1 and t2, if any
    int join_rhs_col = -1;
};

BoundConstraint bind_constraint(const Dataset& dataset, const DenialConstraint& dc, int index);

/// binding[slot] is the row bound to that tuple variable; value_of(row, col)
/// supplies cell values (observed or sampled).
template <class ValueFn>
bool all_predicates_hold(const BoundConstraint& bc, const int binding[2], double sim,
                         ValueFn&& value_of) {
    for (const auto& p : bc.preds) {
        const Value& lhs = p.lhs_col >= 0 ? value_of(binding[p.lhs_slot], p.lhs_col) : p.lhs_const;
        const Value& rhs = p.rhs_col >= 0 ? value_of(binding[p.rhs_slot], p.rhs_col) : p.rhs_const;
        if (!eval_op(p.op, lhs, rhs, sim)) return false;
    }
    return true;
}

/// Violated under either orientation of the pair (or the single binding for
/// arity-1).
template <class ValueFn>
bool binding_violates(const BoundConstraint& bc, int row_i, int row_j, double sim,
                      ValueFn&& value_of) {
    if (bc.arity == 1) {
        int b[2] = {row_i, row_i};
        return all_predicates_hold(bc, b, sim, value_of);
    }
    int fwd[2] = {row_i, row_j};
    int rev[2] = {row_j, row_i};
    return all_predicates_hold(bc, fwd, sim, value_of) ||
           all_predicates_hold(bc, rev, sim, value_of);
}

/// A tuple binding under which every predicate of a constraint holds
/// (i.e. the negated conjunction is violated).
struct Violation {
    int constraint = -1;      // index into the constraint list
    int row_i = -1;           // binding of t1
    int row_j = -1;           // binding of t2; equals row_i for arity-1
    std::vector<Cell> cells;  // referenced cells, sorted and deduped
};

struct Hyperedge {
    int constraint = -1;
    std::vector<Cell> cells;
};

/// Nodes are cells that participate in detected violations; hyperedges link
/// the cells of one violation and carry the constraint that produced it.
struct ConflictHypergraph {
    std::vector<Cell> nodes;  // sorted
    std::vector<Hyperedge> edges;
};

struct DetectionResult {
    std::vector<Cell> noisy;  // sorted
    std::vector<Cell> clean;  // sorted; complement of noisy over all cells

    bool is_noisy(const Cell& c) const { return noisy_set_.count(c) > 0; }
    std::unordered_set<Cell, CellHash> noisy_set_;
};

struct DetectOptions {
    double sim_threshold = 0.8;
    int threads = 1;
};

/// Exhaustive per-constraint scan with a hash-join fast path on the first
/// EQ predicate between t1 and t2. Unordered pairs are scanned once and
/// both orientations evaluated; violations are deduplicated by
/// (constraint, cell set). A tuple never violates an arity-2 constraint
/// with itself.
std::pair<std::vector<Violation>, ConflictHypergraph> detect_violations(
    const Dataset& dataset, const std::vector<DenialConstraint>& constraints,
    const DetectOptions& opts = {});

/// noisy = hypergraph nodes + extra_noisy; clean = complement.
DetectionResult split_noisy_clean(const Dataset& dataset, const ConflictHypergraph& graph,
                                  const std::vector<Cell>& extra_noisy = {});

/// CSV of tid,attribute with a header row.
std::vector<Cell> load_noisy_cells(const Dataset& dataset, const std::string& path);

}  // namespace holorepair
