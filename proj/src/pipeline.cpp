#include "holorepair/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "holorepair/errors.hpp"

namespace holorepair {

namespace {

struct StageClock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        auto t1 = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(std::string(name) + ": " + e.what());
    }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    if (cfg.input.empty()) throw ContractError("config: input CSV required");
    if (cfg.dcs_path.empty()) throw ContractError("config: constraint file required");

    StageClock clock;

    LoadOptions load_opts{cfg.tid_col, cfg.src_col};
    Dataset data = stage("load", [&] { return Dataset::load_csv(cfg.input, load_opts); });
    auto constraints = stage("load", [&] { return load_dcs(cfg.dcs_path); });
    std::vector<MatchingDependency> mds;
    if (!cfg.mds_path.empty()) mds = stage("load", [&] { return load_mds(cfg.mds_path); });
    DictRegistry dicts;
    stage("load", [&] {
        for (const auto& [id, file] : cfg.dicts) dicts.load(file, id);
        return 0;
    });
    std::vector<Cell> extra_noisy;
    if (!cfg.noisy_path.empty())
        extra_noisy = stage("load", [&] { return load_noisy_cells(data, cfg.noisy_path); });
    GroundTruth groundtruth;
    if (!cfg.groundtruth_path.empty())
        groundtruth = stage("load", [&] { return load_groundtruth(data, cfg.groundtruth_path); });
    clock.lap();  // loading is not part of the reported stage split

    DetectOptions detect_opts{cfg.sim_threshold, cfg.threads};
    auto [violations, hypergraph] =
        stage("detect", [&] { return detect_violations(data, constraints, detect_opts); });
    DetectionResult detection =
        stage("detect", [&] { return split_noisy_clean(data, hypergraph, extra_noisy); });

    PipelineResult result;
    result.violations = violations.size();
    result.noisy_cells = detection.noisy.size();
    result.timings.detect_seconds = clock.lap();

    CoocTable cooc = stage("compile", [&] { return CoocTable::build(data); });
    DomainMap domains =
        stage("compile", [&] { return prune_domain(data, cooc, detection.noisy, cfg.tau); });
    std::vector<MatchedFact> facts;
    if (!mds.empty()) {
        facts = stage("compile",
                      [&] { return match_dependencies(data, dicts, mds, cfg.sim_threshold); });
        stage("compile", [&] {
            extend_domains(domains, facts, data, cooc);
            return 0;
        });
    }
    PartitionPlan plan = stage("compile", [&] {
        return cfg.no_partition ? PartitionPlan::trivial(data, constraints.size())
                                : partition_groups(hypergraph, constraints.size());
    });
    // relaxed features ground over the whole table, as the training
    // examples do; only hard factors are confined to conflict groups
    PartitionPlan all_tuples = PartitionPlan::trivial(data, constraints.size());
    GroundConfig ground_cfg{cfg.mode, cfg.sim_threshold, cfg.prior_weight, cfg.dc_weight};
    FactorGraph graph = stage("compile", [&] {
        return ground(data, detection, domains, constraints, plan, all_tuples, facts, ground_cfg);
    });
    result.stats = graph.stats;
    result.query_variables = graph.query_vars.size();

    if (!cfg.dump_rules_path.empty()) {
        std::vector<RelaxedRule> rules;
        for (std::size_t k = 0; k < constraints.size(); ++k) {
            auto rs = relax_dc(constraints[k], static_cast<int>(k));
            rules.insert(rules.end(), rs.begin(), rs.end());
        }
        std::ofstream f(cfg.dump_rules_path);
        if (!f) throw Error(cfg.dump_rules_path + ": cannot open for writing");
        f << describe_rules(constraints, rules, graph.stats);
    }

    if (cfg.dry_run) {
        result.repaired = data;
        result.timings.compile_seconds = clock.lap();
        return result;
    }

    std::vector<RelaxedRule> rules;
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        auto rs = relax_dc(constraints[k], static_cast<int>(k));
        rules.insert(rules.end(), rs.begin(), rs.end());
    }
    TrainingConfig train_cfg;
    train_cfg.tau = cfg.tau;
    train_cfg.cap = cfg.train_cap;
    train_cfg.seed = cfg.seed;
    train_cfg.mode = cfg.mode;
    train_cfg.sim_threshold = cfg.sim_threshold;
    train_cfg.prior_weight = cfg.prior_weight;
    auto training = stage("compile", [&] {
        return build_training_set(data, cooc, detection, rules, facts, train_cfg, graph.weights);
    });
    result.training_examples = training.size();
    result.timings.compile_seconds = clock.lap();

    stage("learn", [&] {
        learn_weights(training, graph.weights, LearnConfig{cfg.epochs, cfg.lr, cfg.l2, cfg.seed});
        return 0;
    });
    MarginalTable marginals = stage("infer", [&] {
        if (cfg.mode == GroundMode::Feats) return closed_form_marginals(graph);
        return gibbs_marginals(graph, SampleConfig{cfg.samples, cfg.burnin, cfg.seed, cfg.chains});
    });

    result.repairs = stage("repair", [&] { return map_repairs(graph, marginals, data); });
    result.repaired = stage("repair", [&] { return apply_repairs(data, result.repairs); });
    result.report_text =
        stage("repair", [&] { return report_to_string(graph, marginals, data); });
    if (!cfg.out_path.empty())
        stage("repair", [&] {
            result.repaired.write_csv(cfg.out_path);
            return 0;
        });
    if (!cfg.report_path.empty())
        stage("repair", [&] {
            std::ofstream f(cfg.report_path, std::ios::binary);
            if (!f) throw Error(cfg.report_path + ": cannot open for writing");
            f << result.report_text;
            return 0;
        });
    if (!groundtruth.empty())
        result.eval =
            stage("repair", [&] { return evaluate(result.repairs, data, groundtruth); });
    result.timings.repair_seconds = clock.lap();
    return result;
}

void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path + ": cannot open");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw LoadError(path + ":" + std::to_string(line_no) + ": expected key=value");
        auto key = canonicalize(line.substr(0, eq)).value_or("");
        auto val = canonicalize(line.substr(eq + 1)).value_or("");
        if (key == "input") cfg.input = val;
        else if (key == "dcs") cfg.dcs_path = val;
        else if (key == "mds") cfg.mds_path = val;
        else if (key == "noisy-cells") cfg.noisy_path = val;
        else if (key == "groundtruth") cfg.groundtruth_path = val;
        else if (key == "out") cfg.out_path = val;
        else if (key == "report") cfg.report_path = val;
        else if (key == "tid-col") cfg.tid_col = val;
        else if (key == "src-col") cfg.src_col = val;
        else if (key == "tau") cfg.tau = std::stod(val);
        else if (key == "sim-threshold") cfg.sim_threshold = std::stod(val);
        else if (key == "prior-weight") cfg.prior_weight = std::stod(val);
        else if (key == "dc-weight") cfg.dc_weight = std::stod(val);
        else if (key == "epochs") cfg.epochs = std::stoi(val);
        else if (key == "lr") cfg.lr = std::stod(val);
        else if (key == "l2") cfg.l2 = std::stod(val);
        else if (key == "samples") cfg.samples = std::stoi(val);
        else if (key == "burnin") cfg.burnin = std::stoi(val);
        else if (key == "chains") cfg.chains = std::stoi(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "threads") cfg.threads = std::stoi(val);
        else if (key == "dict") {
            std::size_t sep = val.find('=');
            if (sep == std::string::npos)
                throw LoadError(path + ":" + std::to_string(line_no) + ": dict needs ID=FILE");
            cfg.dicts.emplace_back(val.substr(0, sep), val.substr(sep + 1));
        } else if (key == "mode") {
            if (val == "feats") cfg.mode = GroundMode::Feats;
            else if (val == "factors") cfg.mode = GroundMode::Factors;
            else if (val == "both") cfg.mode = GroundMode::Both;
            else throw LoadError(path + ": unknown mode '" + val + "'");
        } else {
            throw LoadError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace holorepair
