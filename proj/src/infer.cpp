#include "holorepair/infer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "holorepair/errors.hpp"

namespace holorepair {

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa; identical across platforms for a given seed
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Shared evaluation helpers

struct Assignment {
    const FactorGraph* g;
    std::vector<int> value;  // candidate index per variable id; -1 for evidence

    const std::string* value_ptr(int row, int col) const {
        const Variable& v = g->variables[static_cast<std::size_t>(row) * g->cols + col];
        if (v.is_query) return &v.candidates[value[v.id]];
        return v.observed ? &*v.observed : nullptr;
    }
};

int hard_h(const FactorGraph& g, const HardBinding& hb, const Assignment& a) {
    const BoundConstraint& bc = g.bound_constraints[hb.constraint];
    auto value_of = [&a](int row, int col) { return a.value_ptr(row, col); };
    auto holds = [&](int r0, int r1) {
        int binding[2] = {r0, r1};
        for (const auto& p : bc.preds) {
            const std::string* lhs = p.lhs_col >= 0 ? value_of(binding[p.lhs_slot], p.lhs_col)
                                                    : (p.lhs_const ? &*p.lhs_const : nullptr);
            const std::string* rhs = p.rhs_col >= 0 ? value_of(binding[p.rhs_slot], p.rhs_col)
                                                    : (p.rhs_const ? &*p.rhs_const : nullptr);
            if (!eval_op(p.op, lhs, rhs, g.sim_threshold)) return false;
        }
        return true;
    };
    bool violated;
    if (hb.row_j < 0)
        violated = holds(hb.row_i, hb.row_i);
    else
        violated = holds(hb.row_i, hb.row_j) || holds(hb.row_j, hb.row_i);
    return violated ? -1 : 1;
}

// Unary contributions are constant during sampling; precompute them.
struct Prepared {
    std::vector<int> query;                     // ids
    std::vector<int> query_pos;                 // var id -> index in query, else -1
    std::vector<std::vector<double>> base;      // per query var, per candidate
    std::vector<std::vector<int>> hard_adj;     // per query var, factor indices (HardDC)
    bool has_multi = false;
};

Prepared prepare(const FactorGraph& g) {
    Prepared p;
    p.query = g.query_vars;
    p.query_pos.assign(g.variables.size(), -1);
    for (std::size_t i = 0; i < p.query.size(); ++i) p.query_pos[p.query[i]] = static_cast<int>(i);
    p.base.resize(p.query.size());
    p.hard_adj.resize(p.query.size());
    for (std::size_t i = 0; i < p.query.size(); ++i)
        p.base[i].assign(g.variables[p.query[i]].candidates.size(), 0.0);

    for (std::size_t fi = 0; fi < g.factors.size(); ++fi) {
        const Factor& f = g.factors[fi];
        if (f.kind == FactorKind::HardDC) {
            int touched = 0;
            for (int v : f.vars) {
                int qp = p.query_pos[v];
                if (qp >= 0) {
                    p.hard_adj[qp].push_back(static_cast<int>(fi));
                    ++touched;
                }
            }
            if (touched > 1) p.has_multi = true;
            continue;
        }
        int qp = p.query_pos[f.vars[0]];
        if (qp < 0) continue;
        double theta = g.weights.value(f.weight) * f.mult;
        for (int d : f.active) p.base[qp][d] += theta;
    }
    return p;
}

void conditional_scores(const FactorGraph& g, const Prepared& p, Assignment& a, std::size_t qp,
                        std::vector<double>& scores) {
    int vid = p.query[qp];
    const Variable& var = g.variables[vid];
    scores.assign(p.base[qp].begin(), p.base[qp].end());
    if (!p.hard_adj[qp].empty()) {
        int saved = a.value[vid];
        for (int d = 0; d < static_cast<int>(var.candidates.size()); ++d) {
            a.value[vid] = d;
            for (int fi : p.hard_adj[qp]) {
                const Factor& f = g.factors[fi];
                scores[d] += g.weights.value(f.weight) * hard_h(g, g.hard_bindings[f.hard], a);
            }
        }
        a.value[vid] = saved;
    }
}

std::vector<double> softmax(std::vector<double> scores) {
    double mx = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (double& s : scores) {
        s = std::exp(s - mx);
        total += s;
    }
    for (double& s : scores) s /= total;
    return scores;
}

Assignment initial_assignment(const FactorGraph& g) {
    Assignment a{&g, std::vector<int>(g.variables.size(), -1)};
    for (int vid : g.query_vars) {
        const Variable& v = g.variables[vid];
        a.value[vid] = v.initial_index >= 0 ? v.initial_index : 0;
    }
    return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Learning

namespace {

std::vector<double> example_scores(const TrainingExample& ex, const WeightTable& w) {
    std::vector<double> s(ex.candidates.size(), 0.0);
    for (const auto& f : ex.factors) {
        double add = w.value(f.weight) * f.mult;
        for (int d : f.active) s[d] += add;
    }
    return s;
}

}  // namespace

void learn_weights(const std::vector<TrainingExample>& examples, WeightTable& weights,
                   const LearnConfig& cfg) {
    std::vector<int> usable;
    for (std::size_t i = 0; i < examples.size(); ++i)
        if (examples[i].candidates.size() >= 2 && examples[i].label >= 0)
            usable.push_back(static_cast<int>(i));
    if (usable.empty()) {
        std::cerr << "warning: no training examples; learnable weights stay zero\n";
        return;
    }

    // aggregated factors can carry large multiplicities; clip the
    // per-factor gradient so one example cannot fling a weight
    constexpr double kGradClip = 1.0;
    std::mt19937_64 rng(cfg.seed);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(usable.begin(), usable.end(), rng);
        for (int idx : usable) {
            const TrainingExample& ex = examples[idx];
            std::vector<double> p = softmax(example_scores(ex, weights));
            for (const auto& f : ex.factors) {
                if (!weights.learnable(f.weight)) continue;
                double pact = 0.0;
                bool label_active = false;
                for (int d : f.active) {
                    pact += p[d];
                    if (d == ex.label) label_active = true;
                }
                double grad = f.mult * (pact - (label_active ? 1.0 : 0.0));
                grad = std::clamp(grad, -kGradClip, kGradClip);
                double theta = weights.value(f.weight);
                weights.set(f.weight, theta - cfg.lr * (grad + cfg.l2 * theta));
            }
        }
        for (std::size_t w = 0; w < weights.size(); ++w) {
            if (!std::isfinite(weights.value(static_cast<int>(w))))
                throw ContractError("non-finite weight after epoch " + std::to_string(epoch) +
                                    " (" + weights.signature(static_cast<int>(w)) + ")");
        }
    }
}

double nll_and_gradient(const std::vector<TrainingExample>& examples, const WeightTable& weights,
                        double l2, std::vector<double>* grad_out) {
    if (grad_out) grad_out->assign(weights.size(), 0.0);
    double loss = 0.0;
    for (const auto& ex : examples) {
        if (ex.candidates.size() < 2 || ex.label < 0) continue;
        std::vector<double> s = example_scores(ex, weights);
        double mx = *std::max_element(s.begin(), s.end());
        double lse = 0.0;
        for (double v : s) lse += std::exp(v - mx);
        lse = mx + std::log(lse);
        loss += lse - s[ex.label];
        if (!grad_out) continue;
        std::vector<double> p(s.size());
        for (std::size_t d = 0; d < s.size(); ++d) p[d] = std::exp(s[d] - lse);
        for (const auto& f : ex.factors) {
            if (!weights.learnable(f.weight)) continue;
            double pact = 0.0;
            bool label_active = false;
            for (int d : f.active) {
                pact += p[d];
                if (d == ex.label) label_active = true;
            }
            (*grad_out)[f.weight] += f.mult * (pact - (label_active ? 1.0 : 0.0));
        }
    }
    for (std::size_t w = 0; w < weights.size(); ++w) {
        if (!weights.learnable(static_cast<int>(w))) continue;
        double theta = weights.value(static_cast<int>(w));
        loss += 0.5 * l2 * theta * theta;
        if (grad_out) (*grad_out)[w] += l2 * theta;
    }
    if (!std::isfinite(loss)) throw ContractError("non-finite training loss");
    return loss;
}

// ---------------------------------------------------------------------------
// Inference

MarginalTable gibbs_marginals(const FactorGraph& graph, const SampleConfig& cfg) {
    if (cfg.samples < 1) throw ContractError("samples must be >= 1");
    Prepared prep = prepare(graph);
    for (int vid : prep.query)
        if (graph.variables[vid].candidates.empty())
            throw ContractError("query variable with empty candidate set");

    std::vector<std::vector<int64_t>> counts(prep.query.size());
    for (std::size_t i = 0; i < prep.query.size(); ++i)
        counts[i].assign(graph.variables[prep.query[i]].candidates.size(), 0);

    int chains = std::max(1, cfg.chains);
    std::vector<double> scores;
    for (int chain = 0; chain < chains; ++chain) {
        std::mt19937_64 rng(cfg.seed ^ (0x9E3779B97F4A7C15ull * (chain + 1)));
        Assignment a = initial_assignment(graph);
        for (int sweep = 0; sweep < cfg.burnin + cfg.samples; ++sweep) {
            for (std::size_t qp = 0; qp < prep.query.size(); ++qp) {
                conditional_scores(graph, prep, a, qp, scores);
                // sample from the conditional without normalizing twice
                double mx = *std::max_element(scores.begin(), scores.end());
                double total = 0.0;
                for (double& s : scores) {
                    s = std::exp(s - mx);
                    total += s;
                }
                double u = uniform01(rng) * total;
                double acc = 0.0;
                int pick = static_cast<int>(scores.size()) - 1;
                for (std::size_t d = 0; d < scores.size(); ++d) {
                    acc += scores[d];
                    if (u < acc) {
                        pick = static_cast<int>(d);
                        break;
                    }
                }
                a.value[prep.query[qp]] = pick;
            }
            if (sweep >= cfg.burnin)
                for (std::size_t qp = 0; qp < prep.query.size(); ++qp)
                    ++counts[qp][a.value[prep.query[qp]]];
        }
    }

    MarginalTable t;
    t.vars = prep.query;
    double denom = static_cast<double>(cfg.samples) * chains;
    for (auto& row : counts) {
        std::vector<double> probs(row.size());
        for (std::size_t d = 0; d < row.size(); ++d) probs[d] = row[d] / denom;
        t.probs.push_back(std::move(probs));
    }
    return t;
}

MarginalTable exact_marginals(const FactorGraph& graph) {
    Prepared prep = prepare(graph);
    double states = 1.0;
    for (int vid : prep.query) {
        const auto& cands = graph.variables[vid].candidates;
        if (cands.empty()) throw ContractError("query variable with empty candidate set");
        states *= static_cast<double>(cands.size());
        if (states > kExactStateBound)
            throw ContractError("joint state space exceeds the exact-inference bound");
    }

    MarginalTable t;
    t.vars = prep.query;
    for (int vid : prep.query)
        t.probs.emplace_back(graph.variables[vid].candidates.size(), 0.0);
    if (prep.query.empty()) return t;

    Assignment a = initial_assignment(graph);
    const std::size_t n = prep.query.size();
    std::vector<int> state(n, 0);
    auto joint_score = [&]() {
        double s = 0.0;
        for (std::size_t qp = 0; qp < n; ++qp) s += prep.base[qp][state[qp]];
        for (const Factor& f : graph.factors)
            if (f.kind == FactorKind::HardDC)
                s += graph.weights.value(f.weight) * hard_h(graph, graph.hard_bindings[f.hard], a);
        return s;
    };

    // two passes: max for stability, then accumulate
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(states));
    while (true) {
        for (std::size_t qp = 0; qp < n; ++qp) a.value[prep.query[qp]] = state[qp];
        scores.push_back(joint_score());
        std::size_t k = 0;
        while (k < n) {
            if (++state[k] < static_cast<int>(graph.variables[prep.query[k]].candidates.size()))
                break;
            state[k] = 0;
            ++k;
        }
        if (k == n) break;
    }
    double mx = *std::max_element(scores.begin(), scores.end());

    std::fill(state.begin(), state.end(), 0);
    double z = 0.0;
    std::size_t idx = 0;
    while (true) {
        double w = std::exp(scores[idx] - mx);
        z += w;
        for (std::size_t qp = 0; qp < n; ++qp) t.probs[qp][state[qp]] += w;
        ++idx;
        std::size_t k = 0;
        while (k < n) {
            if (++state[k] < static_cast<int>(graph.variables[prep.query[k]].candidates.size()))
                break;
            state[k] = 0;
            ++k;
        }
        if (k == n) break;
    }
    for (auto& row : t.probs)
        for (double& p : row) p /= z;
    return t;
}

MarginalTable closed_form_marginals(const FactorGraph& graph) {
    for (const Factor& f : graph.factors)
        if (f.vars.size() > 1)
            throw ContractError("closed form requires a model with only unary factors");
    Prepared prep = prepare(graph);
    Assignment a = initial_assignment(graph);

    MarginalTable t;
    t.vars = prep.query;
    std::vector<double> scores;
    for (std::size_t qp = 0; qp < prep.query.size(); ++qp) {
        if (graph.variables[prep.query[qp]].candidates.empty())
            throw ContractError("query variable with empty candidate set");
        conditional_scores(graph, prep, a, qp, scores);
        t.probs.push_back(softmax(scores));
    }
    return t;
}

}  // namespace holorepair
