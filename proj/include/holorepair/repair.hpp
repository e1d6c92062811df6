#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "holorepair/infer.hpp"

namespace holorepair {

struct Repair {
    Cell cell;
    Value old_value;
    std::string new_value;
    double marginal = 0.0;  // marginal probability of the chosen value
};

struct EvalResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t repairs_made = 0;
    std::size_t correct_repairs = 0;
    std::size_t total_errors = 0;
    bool no_repairs = false;
};

using GroundTruth = std::unordered_map<Cell, Value, CellHash>;

/// Argmax over each query variable's marginals. Ties prefer the initial
/// value, then the lexicographically smallest candidate. A repair is emitted
/// only when the chosen value differs from the initial one.
std::vector<Repair> map_repairs(const FactorGraph& graph, const MarginalTable& marginals,
                                const Dataset& dataset);

Dataset apply_repairs(const Dataset& dataset, const std::vector<Repair>& repairs);

/// Correct repair: chosen value equals the ground truth. Total errors: cells
/// covered by the ground truth whose initial value differs from it. Zero
/// repairs reports precision 0 with the no-repairs flag; zero errors reports
/// recall 1.
EvalResult evaluate(const std::vector<Repair>& repairs, const Dataset& dataset,
                    const GroundTruth& groundtruth);

/// CSV of tid,attribute,value with a header row.
GroundTruth load_groundtruth(const Dataset& dataset, const std::string& path);

/// Line-delimited JSON: one record per query variable
/// {tid, attribute, old, new, marginal, repaired}, then a summary line with
/// per-bucket marginal counts.
std::string report_to_string(const FactorGraph& graph, const MarginalTable& marginals,
                             const Dataset& dataset);
void write_report(const FactorGraph& graph, const MarginalTable& marginals,
                  const Dataset& dataset, const std::string& path);

}  // namespace holorepair
