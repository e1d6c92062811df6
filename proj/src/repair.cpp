#include "holorepair/repair.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "holorepair/csv.hpp"
#include "holorepair/errors.hpp"

namespace holorepair {

namespace {

// Chosen candidate index for one variable under the tie-break rules.
int choose(const Variable& var, const std::vector<double>& probs) {
    double best = *std::max_element(probs.begin(), probs.end());
    constexpr double kTie = 1e-12;
    if (var.initial_index >= 0 && probs[var.initial_index] >= best - kTie)
        return var.initial_index;
    int pick = -1;
    for (int d = 0; d < static_cast<int>(probs.size()); ++d) {
        if (probs[d] < best - kTie) continue;
        if (pick < 0 || var.candidates[d] < var.candidates[pick]) pick = d;
    }
    return pick;
}

}  // namespace

std::vector<Repair> map_repairs(const FactorGraph& graph, const MarginalTable& marginals,
                                const Dataset& dataset) {
    if (marginals.vars.size() != graph.query_vars.size())
        throw ContractError("marginals do not cover all query variables");
    std::vector<Repair> out;
    for (std::size_t i = 0; i < marginals.vars.size(); ++i) {
        const Variable& var = graph.var(marginals.vars[i]);
        const auto& probs = marginals.probs[i];
        int pick = choose(var, probs);
        const std::string& value = var.candidates[pick];
        if (var.observed && *var.observed == value) continue;  // confirmed initial value
        out.push_back({var.cell, dataset.value(var.cell), value, probs[pick]});
    }
    return out;
}

Dataset apply_repairs(const Dataset& dataset, const std::vector<Repair>& repairs) {
    std::vector<std::pair<Cell, Value>> updates;
    updates.reserve(repairs.size());
    for (const auto& r : repairs) updates.emplace_back(r.cell, Value(r.new_value));
    return dataset.with_repairs(updates);
}

EvalResult evaluate(const std::vector<Repair>& repairs, const Dataset& dataset,
                    const GroundTruth& groundtruth) {
    EvalResult res;
    res.repairs_made = repairs.size();
    for (const auto& r : repairs) {
        auto it = groundtruth.find(r.cell);
        if (it == groundtruth.end())
            throw ContractError("ground truth does not cover repaired cell (" +
                                dataset.tuple_id(r.cell.row) + ", " +
                                dataset.attribute(r.cell.col) + ")");
        if (it->second && *it->second == r.new_value) ++res.correct_repairs;
    }
    for (const auto& [cell, truth] : groundtruth) {
        if (dataset.value(cell) != truth) ++res.total_errors;
    }
    if (res.repairs_made == 0) {
        res.precision = 0.0;
        res.no_repairs = true;
    } else {
        res.precision = static_cast<double>(res.correct_repairs) / res.repairs_made;
    }
    res.recall = res.total_errors == 0
                     ? 1.0
                     : static_cast<double>(res.correct_repairs) / res.total_errors;
    double pr = res.precision + res.recall;
    res.f1 = pr > 0 ? 2.0 * res.precision * res.recall / pr : 0.0;
    return res;
}

GroundTruth load_groundtruth(const Dataset& dataset, const std::string& path) {
    csv::Table t = csv::read_file(path);
    if (t.header.size() < 3) throw LoadError(path + ": expected columns tid,attribute,value");
    GroundTruth gt;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Value tid = canonicalize(t.rows[i][0]);
        Value attr = canonicalize(t.rows[i][1]);
        if (!tid || !attr) throw LoadError(path + ": blank field at row " + std::to_string(i + 1));
        int row = dataset.find_tuple(*tid);
        if (row < 0) throw LoadError(path + ": unknown tuple-id '" + *tid + "'");
        int col = dataset.find_attribute(*attr);
        if (col < 0) throw LoadError(path + ": unknown attribute '" + *attr + "'");
        gt[Cell{row, col}] = canonicalize(t.rows[i][2]);
    }
    return gt;
}

static const char* kBucketNames[5] = {"[0.5,0.6)", "[0.6,0.7)", "[0.7,0.8)", "[0.8,0.9)",
                                      "[0.9,1.0]"};

std::string report_to_string(const FactorGraph& graph, const MarginalTable& marginals,
                             const Dataset& dataset) {
    std::string out;
    std::size_t buckets[5] = {0, 0, 0, 0, 0};
    std::size_t below = 0;
    std::size_t repaired_count = 0;
    for (std::size_t i = 0; i < marginals.vars.size(); ++i) {
        const Variable& var = graph.var(marginals.vars[i]);
        const auto& probs = marginals.probs[i];
        int pick = choose(var, probs);
        double m = probs[pick];
        bool repaired = !(var.observed && *var.observed == var.candidates[pick]);
        if (repaired) ++repaired_count;
        nlohmann::json rec;
        rec["tid"] = dataset.tuple_id(var.cell.row);
        rec["attribute"] = dataset.attribute(var.cell.col);
        if (var.observed)
            rec["old"] = *var.observed;
        else
            rec["old"] = nullptr;
        rec["new"] = var.candidates[pick];
        rec["marginal"] = m;
        rec["repaired"] = repaired;
        out += rec.dump();
        out += '\n';
        if (m < 0.5)
            ++below;
        else if (m < 0.6)
            ++buckets[0];
        else if (m < 0.7)
            ++buckets[1];
        else if (m < 0.8)
            ++buckets[2];
        else if (m < 0.9)
            ++buckets[3];
        else
            ++buckets[4];
    }
    nlohmann::json summary;
    summary["summary"]["query_variables"] = marginals.vars.size();
    summary["summary"]["repairs"] = repaired_count;
    for (int b = 0; b < 5; ++b) summary["summary"]["buckets"][kBucketNames[b]] = buckets[b];
    summary["summary"]["buckets"]["[0.0,0.5)"] = below;
    out += summary.dump();
    out += '\n';
    return out;
}

void write_report(const FactorGraph& graph, const MarginalTable& marginals,
                  const Dataset& dataset, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(path + ": cannot open for writing");
    f << report_to_string(graph, marginals, dataset);
    if (!f) throw Error(path + ": write failed");
}

}  // namespace holorepair
