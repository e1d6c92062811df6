#include "holorepair/domain.hpp"

#include <algorithm>

#include "holorepair/errors.hpp"

namespace holorepair {

CoocTable CoocTable::build(const Dataset& dataset) {
    CoocTable t;
    t.cols_ = static_cast<int>(dataset.attribute_count());
    t.unary_.resize(t.cols_);
    t.pairs_.resize(static_cast<std::size_t>(t.cols_) * t.cols_);
    for (int r = 0; r < static_cast<int>(dataset.tuple_count()); ++r) {
        for (int a = 0; a < t.cols_; ++a) {
            const Value& va = dataset.value(r, a);
            if (!va) continue;
            ++t.unary_[a][*va];
            for (int b = a + 1; b < t.cols_; ++b) {
                const Value& vb = dataset.value(r, b);
                if (!vb) continue;
                ++t.pairs_[a * t.cols_ + b][*va][*vb];
            }
        }
    }
    return t;
}

int CoocTable::unary_count(int col, const std::string& v) const {
    const auto& m = unary_[col];
    auto it = m.find(v);
    return it == m.end() ? 0 : it->second;
}

int CoocTable::pair_count(int col_a, const std::string& va, int col_b,
                          const std::string& vb) const {
    if (col_a == col_b) throw ContractError("pair count needs two distinct attributes");
    const std::string* x = &va;
    const std::string* y = &vb;
    int a = col_a, b = col_b;
    if (a > b) {
        std::swap(a, b);
        std::swap(x, y);
    }
    const auto& m = pairs_[a * cols_ + b];
    auto it = m.find(*x);
    if (it == m.end()) return 0;
    auto jt = it->second.find(*y);
    return jt == it->second.end() ? 0 : jt->second;
}

double CoocTable::cooc_prob(int col_v, const std::string& v, int col_cond,
                            const std::string& cond) const {
    int denom = unary_count(col_cond, cond);
    if (denom == 0)
        throw ContractError("undefined conditional: '" + cond + "' never appears");
    return static_cast<double>(pair_count(col_v, v, col_cond, cond)) / denom;
}

CandidateDomain candidates_for_cell(const Dataset& dataset, const CoocTable& table, Cell cell,
                                    double tau) {
    const int cols = static_cast<int>(dataset.attribute_count());
    const auto& adom = dataset.active_domain(cell.col);

    // max conditional over co-cells, used both for the tau filter and for
    // the candidate ordering
    std::unordered_map<std::string, double> max_prob;
    std::vector<std::string> picked;
    for (int b = 0; b < cols; ++b) {
        if (b == cell.col) continue;
        const Value& cond = dataset.value(cell.row, b);
        if (!cond) continue;  // no conditional defined for NULL co-cells
        for (const auto& v : adom) {
            double p = table.cooc_prob(cell.col, v, b, *cond);
            auto [it, fresh] = max_prob.emplace(v, p);
            if (!fresh) it->second = std::max(it->second, p);
        }
    }

    CandidateDomain out;
    out.cell = cell;
    for (const auto& v : adom) {
        auto it = max_prob.find(v);
        if (it != max_prob.end() && it->second >= tau) picked.push_back(v);
    }

    const Value& init = dataset.value(cell.row, cell.col);
    if (init && std::find(picked.begin(), picked.end(), *init) == picked.end())
        picked.push_back(*init);

    if (!init && picked.empty()) {
        // NULL cell with nothing above threshold: most frequent values,
        // capped; frequency descending, ties lexicographic
        std::vector<std::pair<int, std::string>> freq;
        for (const auto& v : adom) freq.emplace_back(-table.unary_count(cell.col, v), v);
        std::sort(freq.begin(), freq.end());
        for (const auto& [negcount, v] : freq) {
            picked.push_back(v);
            if (static_cast<int>(picked.size()) >= kNullDomainCap) break;
        }
    }

    std::sort(picked.begin(), picked.end(), [&](const std::string& a, const std::string& b) {
        double pa = max_prob.count(a) ? max_prob.at(a) : 0.0;
        double pb = max_prob.count(b) ? max_prob.at(b) : 0.0;
        if (pa != pb) return pa > pb;
        return a < b;
    });
    out.candidates = std::move(picked);
    if (init) out.initial_index = out.index_of(*init);
    return out;
}

double max_cooc_prob(const Dataset& dataset, const CoocTable& table, Cell cell,
                     const std::string& v) {
    double best = 0.0;
    for (int b = 0; b < static_cast<int>(dataset.attribute_count()); ++b) {
        if (b == cell.col) continue;
        const Value& cond = dataset.value(cell.row, b);
        if (!cond) continue;
        best = std::max(best, table.cooc_prob(cell.col, v, b, *cond));
    }
    return best;
}

DomainMap prune_domain(const Dataset& dataset, const CoocTable& table,
                       const std::vector<Cell>& noisy, double tau) {
    if (tau < 0.0 || tau > 1.0) throw ContractError("tau must lie in [0,1]");
    DomainMap out;
    out.reserve(noisy.size());
    for (const Cell& c : noisy) out.emplace(c, candidates_for_cell(dataset, table, c, tau));
    return out;
}

}  // namespace holorepair
