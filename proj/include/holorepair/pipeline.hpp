#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holorepair/repair.hpp"

namespace holorepair {

struct PipelineConfig {
    std::string input;
    std::string dcs_path;
    std::string mds_path;
    std::string noisy_path;
    std::string groundtruth_path;
    std::string out_path;
    std::string report_path;
    std::string dump_rules_path;
    std::vector<std::pair<std::string, std::string>> dicts;  // id -> file

    std::string tid_col;
    std::string src_col;

    double tau = 0.5;
    GroundMode mode = GroundMode::Feats;
    double sim_threshold = 0.8;
    double prior_weight = 1.0;
    double dc_weight = 10.0;

    int epochs = 20;
    double lr = 0.1;
    double l2 = 1e-4;
    std::size_t train_cap = 5000;

    int samples = 20000;
    int burnin = 2000;
    int chains = 1;

    uint64_t seed = 42;
    int threads = 1;
    bool dry_run = false;
    bool no_partition = false;  // ground over one all-tuples group per constraint
};

struct StageTimings {
    double detect_seconds = 0.0;
    double compile_seconds = 0.0;
    double repair_seconds = 0.0;
};

struct PipelineResult {
    Dataset repaired;
    std::vector<Repair> repairs;
    std::optional<EvalResult> eval;
    GroundStats stats;
    std::size_t query_variables = 0;
    std::size_t noisy_cells = 0;
    std::size_t violations = 0;
    std::size_t training_examples = 0;
    StageTimings timings;
    std::string report_text;  // empty on dry runs
};

/// load -> detect -> prune -> match -> partition -> ground -> learn ->
/// infer -> repair -> report. Stage failures rethrow with a stage label.
/// Identical configs and seeds produce identical outputs. Feats-mode
/// marginals use the closed form (the grounded model is unary); factor
/// modes run Gibbs.
PipelineResult run_pipeline(const PipelineConfig& config);

/// key=value file, '#' comments; flags override file entries.
void apply_config_file(PipelineConfig& config, const std::string& path);

}  // namespace holorepair
