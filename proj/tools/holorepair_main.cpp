#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holorepair/errors.hpp"
#include "holorepair/pipeline.hpp"

using namespace holorepair;

int main(int argc, char** argv) {
    CLI::App app{"holorepair: constraint-driven probabilistic data repair"};

    PipelineConfig cfg;
    std::string config_file;
    std::string mode = "feats";
    std::vector<std::string> dict_args;

    app.add_option("--config", config_file, "key=value config file (flags win)");
    app.add_option("--input", cfg.input, "input CSV (header row required)");
    app.add_option("--dcs", cfg.dcs_path, "denial constraint file, one per line");
    app.add_option("--mds", cfg.mds_path, "matching dependency file");
    app.add_option("--dict", dict_args, "external dictionary, ID=FILE (repeatable)");
    app.add_option("--noisy-cells", cfg.noisy_path, "extra noisy cells, CSV of tid,attribute");
    app.add_option("--groundtruth", cfg.groundtruth_path, "ground truth, CSV of tid,attribute,value");
    app.add_option("--out", cfg.out_path, "repaired CSV output");
    app.add_option("--report", cfg.report_path, "JSONL repair report output");
    app.add_option("--dump-rules", cfg.dump_rules_path, "write a rule/factor listing");
    app.add_option("--tid-col", cfg.tid_col, "column holding tuple ids");
    app.add_option("--src-col", cfg.src_col, "column holding tuple provenance");
    app.add_option("--tau", cfg.tau, "domain pruning threshold")->check(CLI::Range(0.0, 1.0));
    app.add_option("--mode", mode, "feats | factors | both")
        ->check(CLI::IsMember({"feats", "factors", "both"}));
    app.add_option("--sim-threshold", cfg.sim_threshold, "similarity threshold for ~ and SIM");
    app.add_option("--prior-weight", cfg.prior_weight, "weight of the keep-initial-value prior");
    app.add_option("--dc-weight", cfg.dc_weight, "weight of hard constraint factors");
    app.add_option("--epochs", cfg.epochs, "SGD epochs");
    app.add_option("--lr", cfg.lr, "SGD learning rate");
    app.add_option("--l2", cfg.l2, "L2 regularization");
    app.add_option("--samples", cfg.samples, "Gibbs samples (factor modes)");
    app.add_option("--burnin", cfg.burnin, "Gibbs burn-in sweeps");
    app.add_option("--chains", cfg.chains, "independent Gibbs chains");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--threads", cfg.threads, "worker threads for detection");
    app.add_flag("--dry-run", cfg.dry_run, "stop after grounding and print factor counts");
    app.add_flag("--no-partition", cfg.no_partition,
                 "ground constraints over all tuples instead of conflict groups");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_file.empty()) {
            // flags win: repopulate from the file, then reparse the flags
            PipelineConfig from_file;
            apply_config_file(from_file, config_file);
            cfg = from_file;
            dict_args.clear();
            app.clear();
            CLI11_PARSE(app, argc, argv);
        }
        for (const auto& d : dict_args) {
            std::size_t sep = d.find('=');
            if (sep == std::string::npos) {
                std::fprintf(stderr, "error: --dict expects ID=FILE, got '%s'\n", d.c_str());
                return 2;
            }
            cfg.dicts.emplace_back(d.substr(0, sep), d.substr(sep + 1));
        }
        if (app.count("--mode") > 0 || config_file.empty()) {
            if (mode == "feats") cfg.mode = GroundMode::Feats;
            else if (mode == "factors") cfg.mode = GroundMode::Factors;
            else cfg.mode = GroundMode::Both;
        }

        PipelineResult res = run_pipeline(cfg);

        std::printf("violations: %zu, noisy cells: %zu, query variables: %zu\n", res.violations,
                    res.noisy_cells, res.query_variables);
        std::printf("factors: cooc=%zu prior=%zu dict=%zu relaxed=%zu hard=%zu (bound %zu)\n",
                    res.stats.cooc, res.stats.prior, res.stats.dict, res.stats.relaxed,
                    res.stats.hard, res.stats.hard_pair_bound);
        if (cfg.dry_run) {
            std::printf("dry run: stopped after grounding\n");
            return 0;
        }
        std::printf("training examples: %zu, repairs: %zu\n", res.training_examples,
                    res.repairs.size());
        if (res.eval) {
            std::printf("precision: %.4f, recall: %.4f, f1: %.4f (%zu/%zu repairs correct, %zu errors)%s\n",
                        res.eval->precision, res.eval->recall, res.eval->f1,
                        res.eval->correct_repairs, res.eval->repairs_made,
                        res.eval->total_errors, res.eval->no_repairs ? " [no-repairs]" : "");
        }
        std::printf("timings: detect %.3fs, compile %.3fs, repair %.3fs\n",
                    res.timings.detect_seconds, res.timings.compile_seconds,
                    res.timings.repair_seconds);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
