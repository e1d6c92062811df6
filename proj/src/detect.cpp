#include "holorepair/detect.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <tuple>

#include "holorepair/csv.hpp"
#include "holorepair/errors.hpp"

namespace holorepair {

BoundConstraint bind_constraint(const Dataset& ds, const DenialConstraint& dc, int index) {
    BoundConstraint bc;
    bc.index = index;
    bc.arity = dc.arity;
    for (const auto& p : dc.predicates) {
        BoundPredicate bp;
        bp.op = p.op;
        auto bind_side = [&](const Operand& o, int& slot, int& col, Value& cval) {
            if (o.kind == Operand::Kind::TupleAttr) {
                slot = o.slot;
                col = ds.attribute_index(o.attr);
                bc.cell_refs.emplace_back(slot, col);
            } else {
                slot = -1;
                col = -1;
                cval = o.text;
            }
        };
        bind_side(p.lhs, bp.lhs_slot, bp.lhs_col, bp.lhs_const);
        bind_side(p.rhs, bp.rhs_slot, bp.rhs_col, bp.rhs_const);
        if (bc.join_lhs_col < 0 && p.op == Op::EQ && bp.lhs_col >= 0 && bp.rhs_col >= 0 &&
            bp.lhs_slot != bp.rhs_slot) {
            bc.join_lhs_col = bp.lhs_slot == 0 ? bp.lhs_col : bp.rhs_col;
            bc.join_rhs_col = bp.lhs_slot == 0 ? bp.rhs_col : bp.lhs_col;
        }
        bc.preds.push_back(bp);
    }
    std::sort(bc.cell_refs.begin(), bc.cell_refs.end());
    bc.cell_refs.erase(std::unique(bc.cell_refs.begin(), bc.cell_refs.end()), bc.cell_refs.end());
    return bc;
}

namespace {

std::vector<Cell> referenced_cells(const BoundConstraint& bc, const int binding[2]) {
    std::vector<Cell> cells;
    cells.reserve(bc.cell_refs.size());
    for (auto [slot, col] : bc.cell_refs) cells.push_back({binding[slot], col});
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

std::vector<Violation> scan_constraint(const Dataset& ds, const BoundConstraint& bc, double sim) {
    std::vector<Violation> out;
    const int n = static_cast<int>(ds.tuple_count());
    // dedup by cell set within this constraint
    std::map<std::vector<Cell>, bool> seen;

    auto value_of = [&ds](int row, int col) -> const Value& { return ds.value(row, col); };
    auto try_binding = [&](int a, int b) {
        int binding[2] = {a, b};
        if (!all_predicates_hold(bc, binding, sim, value_of)) return;
        auto cells = referenced_cells(bc, binding);
        if (!seen.emplace(cells, true).second) return;
        out.push_back({bc.index, a, b, std::move(cells)});
    };

    if (bc.arity == 1) {
        for (int i = 0; i < n; ++i) try_binding(i, i);
        return out;
    }

    if (bc.join_lhs_col >= 0) {
        // hash-join fast path: unordered pairs that can satisfy the first
        // t1/t2 EQ predicate in at least one orientation
        std::unordered_map<std::string, std::vector<int>> by_lhs;
        for (int i = 0; i < n; ++i) {
            const Value& v = ds.value(i, bc.join_lhs_col);
            if (v) by_lhs[*v].push_back(i);
        }
        std::vector<int64_t> pairs;
        for (int j = 0; j < n; ++j) {
            const Value& v = ds.value(j, bc.join_rhs_col);
            if (!v) continue;
            auto it = by_lhs.find(*v);
            if (it == by_lhs.end()) continue;
            for (int i : it->second) {
                if (i == j) continue;
                int lo = std::min(i, j), hi = std::max(i, j);
                pairs.push_back((static_cast<int64_t>(lo) << 32) | hi);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        for (int64_t key : pairs) {
            int lo = static_cast<int>(key >> 32);
            int hi = static_cast<int>(key & 0xffffffff);
            try_binding(lo, hi);
            try_binding(hi, lo);
        }
        return out;
    }

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            try_binding(i, j);
            try_binding(j, i);
        }
    }
    return out;
}

}  // namespace

std::pair<std::vector<Violation>, ConflictHypergraph> detect_violations(
    const Dataset& dataset, const std::vector<DenialConstraint>& constraints,
    const DetectOptions& opts) {
    std::vector<BoundConstraint> bound;
    bound.reserve(constraints.size());
    for (std::size_t k = 0; k < constraints.size(); ++k)
        bound.push_back(bind_constraint(dataset, constraints[k], static_cast<int>(k)));

    std::vector<std::vector<Violation>> per_constraint(bound.size());
    if (opts.threads > 1 && bound.size() > 1) {
        std::vector<std::future<std::vector<Violation>>> futs;
        futs.reserve(bound.size());
        for (const auto& bc : bound)
            futs.push_back(std::async(std::launch::async, [&dataset, &bc, &opts] {
                return scan_constraint(dataset, bc, opts.sim_threshold);
            }));
        for (std::size_t k = 0; k < futs.size(); ++k) per_constraint[k] = futs[k].get();
    } else {
        for (std::size_t k = 0; k < bound.size(); ++k)
            per_constraint[k] = scan_constraint(dataset, bound[k], opts.sim_threshold);
    }

    // merged deterministically by (constraint, tuple) order
    std::vector<Violation> violations;
    for (auto& vs : per_constraint) {
        std::sort(vs.begin(), vs.end(), [](const Violation& a, const Violation& b) {
            return std::tie(a.row_i, a.row_j) < std::tie(b.row_i, b.row_j);
        });
        violations.insert(violations.end(), std::make_move_iterator(vs.begin()),
                          std::make_move_iterator(vs.end()));
    }

    ConflictHypergraph graph;
    std::set<Cell> nodes;
    for (const auto& v : violations) {
        graph.edges.push_back({v.constraint, v.cells});
        nodes.insert(v.cells.begin(), v.cells.end());
    }
    graph.nodes.assign(nodes.begin(), nodes.end());
    return {std::move(violations), std::move(graph)};
}

DetectionResult split_noisy_clean(const Dataset& dataset, const ConflictHypergraph& graph,
                                  const std::vector<Cell>& extra_noisy) {
    DetectionResult res;
    for (const Cell& c : graph.nodes) res.noisy_set_.insert(c);
    for (const Cell& c : extra_noisy) {
        if (c.row < 0 || c.row >= static_cast<int>(dataset.tuple_count()) || c.col < 0 ||
            c.col >= static_cast<int>(dataset.attribute_count()))
            throw ContractError("extra noisy cell outside the dataset");
        res.noisy_set_.insert(c);
    }
    for (int r = 0; r < static_cast<int>(dataset.tuple_count()); ++r) {
        for (int c = 0; c < static_cast<int>(dataset.attribute_count()); ++c) {
            Cell cell{r, c};
            if (res.noisy_set_.count(cell))
                res.noisy.push_back(cell);
            else
                res.clean.push_back(cell);
        }
    }
    return res;
}

std::vector<Cell> load_noisy_cells(const Dataset& dataset, const std::string& path) {
    csv::Table t = csv::read_file(path);
    if (t.header.size() < 2) throw LoadError(path + ": expected columns tid,attribute");
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Value tid = canonicalize(t.rows[i][0]);
        Value attr = canonicalize(t.rows[i][1]);
        if (!tid || !attr) throw LoadError(path + ": blank field at row " + std::to_string(i + 1));
        int row = dataset.find_tuple(*tid);
        if (row < 0) throw LoadError(path + ": unknown tuple-id '" + *tid + "'");
        int col = dataset.find_attribute(*attr);
        if (col < 0) throw LoadError(path + ": unknown attribute '" + *attr + "'");
        cells.push_back({row, col});
    }
    return cells;
}

}  // namespace holorepair
