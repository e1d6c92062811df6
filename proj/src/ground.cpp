#include "holorepair/ground.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "holorepair/errors.hpp"

namespace holorepair {

// ---------------------------------------------------------------------------
// Partition plan

PartitionPlan PartitionPlan::trivial(const Dataset& dataset, std::size_t n_constraints) {
    PartitionPlan plan;
    std::vector<int> all(dataset.tuple_count());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t k = 0; k < n_constraints; ++k)
        plan.groups.push_back({static_cast<int>(k), all});
    return plan;
}

PartitionPlan partition_groups(const ConflictHypergraph& graph, std::size_t n_constraints) {
    PartitionPlan plan;
    for (std::size_t k = 0; k < n_constraints; ++k) {
        // project this constraint's hyperedges to tuples and take connected
        // components of the resulting tuple graph
        std::map<int, std::vector<int>> adj;  // tuple -> neighbours
        for (const auto& e : graph.edges) {
            if (e.constraint != static_cast<int>(k)) continue;
            std::set<int> rows;
            for (const Cell& c : e.cells) rows.insert(c.row);
            auto first = *rows.begin();
            adj[first];
            for (int r : rows) {
                if (r == first) continue;
                adj[first].push_back(r);
                adj[r].push_back(first);
            }
        }
        std::set<int> visited;
        for (const auto& [start, _] : adj) {
            if (visited.count(start)) continue;
            std::vector<int> component, stack{start};
            visited.insert(start);
            while (!stack.empty()) {
                int cur = stack.back();
                stack.pop_back();
                component.push_back(cur);
                for (int nb : adj[cur]) {
                    if (visited.insert(nb).second) stack.push_back(nb);
                }
            }
            std::sort(component.begin(), component.end());
            plan.groups.push_back({static_cast<int>(k), std::move(component)});
        }
    }
    std::sort(plan.groups.begin(), plan.groups.end(), [](const TupleGroup& a, const TupleGroup& b) {
        return std::tie(a.constraint, a.rows) < std::tie(b.constraint, b.rows);
    });
    return plan;
}

// ---------------------------------------------------------------------------
// Variables

std::vector<Variable> build_variables(const Dataset& dataset, const DetectionResult& detection,
                                      const DomainMap& domains) {
    const int rows = static_cast<int>(dataset.tuple_count());
    const int cols = static_cast<int>(dataset.attribute_count());
    std::vector<Variable> vars;
    vars.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            Cell cell{r, c};
            Variable v;
            v.id = r * cols + c;
            v.cell = cell;
            v.observed = dataset.value(cell);
            if (detection.is_noisy(cell)) {
                auto it = domains.find(cell);
                if (it == domains.end())
                    throw ContractError("noisy cell (" + dataset.tuple_id(r) + ", " +
                                        dataset.attribute(c) + ") has no candidate domain");
                if (it->second.candidates.size() >= 2) {
                    v.is_query = true;
                    v.candidates = it->second.candidates;
                    v.initial_index = it->second.initial_index;
                }
            }
            if (!v.is_query) {
                // evidence, fixed at the observed value
                if (v.observed) {
                    v.candidates = {*v.observed};
                    v.initial_index = 0;
                }
            }
            vars.push_back(std::move(v));
        }
    }
    return vars;
}

// ---------------------------------------------------------------------------
// Weights

int WeightTable::intern(const std::string& signature, bool learnable) {
    auto it = index_.find(signature);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(values_.size());
    values_.push_back(0.0);
    learnable_.push_back(learnable ? 1 : 0);
    sigs_.push_back(signature);
    index_.emplace(signature, id);
    return id;
}

int WeightTable::find(const std::string& signature) const {
    auto it = index_.find(signature);
    return it == index_.end() ? -1 : it->second;
}

std::string feature_weight_sig(const std::string& attr, const std::string& candidate,
                               const std::string& feat_attr, const std::string& feat_value) {
    std::string s = "F|";
    s += attr;
    s += '|';
    s += candidate;
    s += '|';
    s += feat_attr;
    s += '|';
    s += feat_value;
    return s;
}

std::string dict_weight_sig(const std::string& dict_id) { return "D|" + dict_id; }

std::string relaxed_weight_sig(const std::string& constraint_id, int predicate_pos) {
    return "R|" + constraint_id + "|" + std::to_string(predicate_pos);
}

// ---------------------------------------------------------------------------
// Relaxed rules

static Op flip_op(Op op) {
    switch (op) {
        case Op::LT: return Op::GT;
        case Op::GT: return Op::LT;
        case Op::LTE: return Op::GTE;
        case Op::GTE: return Op::LTE;
        default: return op;  // EQ, IQ, SIM are symmetric
    }
}

namespace {

std::string encode_operand(int slot, const std::string& attr, const Value& cval) {
    if (slot >= 0) return "t" + std::to_string(slot) + "." + attr;
    return "c:" + cval.value_or("\x01null");
}

std::string encode_cond(RelaxedCond c) {
    // orientation-normalized so the t1/t2 swap maps conditions onto each other
    if (c.op == Op::GT || c.op == Op::GTE) {
        c.op = c.op == Op::GT ? Op::LT : Op::LTE;
        std::swap(c.lhs_slot, c.rhs_slot);
        std::swap(c.lhs_attr, c.rhs_attr);
        std::swap(c.lhs_const, c.rhs_const);
    }
    std::string a = encode_operand(c.lhs_slot, c.lhs_attr, c.lhs_const);
    std::string b = encode_operand(c.rhs_slot, c.rhs_attr, c.rhs_const);
    if ((c.op == Op::EQ || c.op == Op::IQ || c.op == Op::SIM) && b < a) std::swap(a, b);
    return std::string(op_name(c.op)) + "(" + a + "," + b + ")";
}

std::string encode_rule(const RelaxedRule& r) {
    std::vector<std::string> body;
    body.reserve(r.body.size());
    for (const auto& c : r.body) body.push_back(encode_cond(c));
    std::sort(body.begin(), body.end());
    std::string s = std::to_string(r.predicate_pos) + "|" + r.target_attr + "|" +
                    op_name(r.viol_op) + "|" +
                    encode_operand(r.other_slot, r.other_attr, r.other_const) + "|";
    for (const auto& b : body) {
        s += b;
        s += ';';
    }
    return s;
}

void swap_rule_slots(RelaxedRule& r) {
    auto sw = [](int& slot) {
        if (slot >= 0) slot = 1 - slot;
    };
    sw(r.other_slot);
    for (auto& c : r.body) {
        sw(c.lhs_slot);
        sw(c.rhs_slot);
    }
}

RelaxedCond cond_from_predicate(const Predicate& p) {
    RelaxedCond c;
    c.op = p.op;
    auto fill = [](const Operand& o, int& slot, std::string& attr, Value& cv) {
        if (o.kind == Operand::Kind::TupleAttr) {
            slot = o.slot;
            attr = o.attr;
        } else {
            slot = -1;
            cv = o.text;
        }
    };
    fill(p.lhs, c.lhs_slot, c.lhs_attr, c.lhs_const);
    fill(p.rhs, c.rhs_slot, c.rhs_attr, c.rhs_const);
    return c;
}

}  // namespace

std::vector<RelaxedRule> relax_dc(const DenialConstraint& dc, int constraint_index) {
    std::vector<RelaxedRule> rules;
    std::set<std::string> seen;
    for (std::size_t k = 0; k < dc.predicates.size(); ++k) {
        const Predicate& pred = dc.predicates[k];
        for (int side = 0; side < 2; ++side) {
            const Operand& target = side == 0 ? pred.lhs : pred.rhs;
            if (target.kind != Operand::Kind::TupleAttr) continue;
            const Operand& other = side == 0 ? pred.rhs : pred.lhs;

            RelaxedRule r;
            r.constraint_id = dc.id;
            r.constraint_index = constraint_index;
            r.predicate_pos = static_cast<int>(k);
            r.arity = dc.arity;
            r.target_attr = target.attr;
            r.viol_op = side == 0 ? pred.op : flip_op(pred.op);
            if (other.kind == Operand::Kind::TupleAttr) {
                r.other_slot = other.slot;
                r.other_attr = other.attr;
            } else {
                r.other_slot = -1;
                r.other_const = other.text;
            }
            for (std::size_t j = 0; j < dc.predicates.size(); ++j) {
                if (j == k) continue;
                r.body.push_back(cond_from_predicate(dc.predicates[j]));
            }
            if (target.slot == 1) swap_rule_slots(r);
            if (seen.insert(encode_rule(r)).second) rules.push_back(std::move(r));
        }
    }
    return rules;
}

// ---------------------------------------------------------------------------
// Feature factors

static constexpr const char* kSrcFeature = "__src__";

using FactIndex = std::unordered_map<Cell, std::vector<const MatchedFact*>, CellHash>;

static FactIndex index_facts(const std::vector<MatchedFact>& facts) {
    FactIndex idx;
    for (const auto& f : facts) idx[f.cell].push_back(&f);
    return idx;
}

namespace {

// Shared template for query variables and training examples.
template <class Emit>
void emit_unary_features(const Dataset& ds, Cell cell, const std::vector<std::string>& candidates,
                         int initial_index, const FactIndex& facts, int prior_weight_id,
                         WeightTable& weights, Emit&& emit) {
    const std::string& attr = ds.attribute(cell.col);
    const int cols = static_cast<int>(ds.attribute_count());
    for (int d = 0; d < static_cast<int>(candidates.size()); ++d) {
        for (int b = 0; b < cols; ++b) {
            if (b == cell.col) continue;
            const Value& co = ds.value(cell.row, b);
            if (!co) continue;
            int w = weights.intern(feature_weight_sig(attr, candidates[d], ds.attribute(b), *co),
                                   true);
            emit(FactorKind::Cooc, w, std::vector<int>{d});
        }
        if (ds.has_provenance() && ds.provenance(cell.row)) {
            int w = weights.intern(
                feature_weight_sig(attr, candidates[d], kSrcFeature, *ds.provenance(cell.row)),
                true);
            emit(FactorKind::Cooc, w, std::vector<int>{d});
        }
    }
    if (initial_index >= 0)
        emit(FactorKind::Prior, prior_weight_id, std::vector<int>{initial_index});
    auto it = facts.find(cell);
    if (it != facts.end()) {
        for (const MatchedFact* f : it->second) {
            auto pos = std::find(candidates.begin(), candidates.end(), f->value);
            if (pos == candidates.end()) continue;
            int w = weights.intern(dict_weight_sig(f->dict_id), true);
            emit(FactorKind::Dict, w,
                 std::vector<int>{static_cast<int>(pos - candidates.begin())});
        }
    }
}

}  // namespace

std::vector<Factor> extract_features(const Dataset& dataset,
                                     const std::vector<Variable>& variables,
                                     const std::vector<MatchedFact>& facts,
                                     WeightTable& weights) {
    std::vector<Factor> out;
    FactIndex fidx = index_facts(facts);
    int prior_id = weights.intern(kPriorWeightSig, false);
    for (const Variable& v : variables) {
        if (!v.is_query) continue;  // evidence carries no factors
        emit_unary_features(dataset, v.cell, v.candidates, v.initial_index, fidx, prior_id,
                            weights,
                            [&](FactorKind kind, int w, std::vector<int> active) {
                                Factor f;
                                f.kind = kind;
                                f.vars = {v.id};
                                f.weight = w;
                                f.active = std::move(active);
                                out.push_back(std::move(f));
                            });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constraint factors

namespace {

struct ResolvedCond {
    Op op;
    int lhs_slot, lhs_col;
    Value lhs_const;
    int rhs_slot, rhs_col;
    Value rhs_const;
};

struct ResolvedRule {
    const RelaxedRule* rule;
    int target_col;
    int other_col;  // -1 for constant operand
    std::vector<ResolvedCond> body;
    int weight_id;
};

ResolvedRule resolve_rule(const Dataset& ds, const RelaxedRule& r, WeightTable& weights) {
    ResolvedRule out;
    out.rule = &r;
    out.target_col = ds.attribute_index(r.target_attr);
    out.other_col = r.other_slot >= 0 ? ds.attribute_index(r.other_attr) : -1;
    for (const auto& c : r.body) {
        ResolvedCond rc;
        rc.op = c.op;
        rc.lhs_slot = c.lhs_slot;
        rc.lhs_col = c.lhs_slot >= 0 ? ds.attribute_index(c.lhs_attr) : -1;
        rc.lhs_const = c.lhs_const;
        rc.rhs_slot = c.rhs_slot;
        rc.rhs_col = c.rhs_slot >= 0 ? ds.attribute_index(c.rhs_attr) : -1;
        rc.rhs_const = c.rhs_const;
        out.body.push_back(rc);
    }
    out.weight_id = weights.intern(relaxed_weight_sig(r.constraint_id, r.predicate_pos), true);
    return out;
}

bool body_holds(const Dataset& ds, const ResolvedRule& rr, const int binding[2], double sim) {
    for (const auto& c : rr.body) {
        const Value& lhs = c.lhs_col >= 0 ? ds.value(binding[c.lhs_slot], c.lhs_col) : c.lhs_const;
        const Value& rhs = c.rhs_col >= 0 ? ds.value(binding[c.rhs_slot], c.rhs_col) : c.rhs_const;
        if (!eval_op(c.op, lhs, rhs, sim)) return false;
    }
    return true;
}

/// Candidate indices completing a violation, or empty when the rule does not
/// fire under this binding.
std::vector<int> relaxed_active(const Dataset& ds, const ResolvedRule& rr,
                                const std::vector<std::string>& candidates, const int binding[2],
                                double sim) {
    if (!body_holds(ds, rr, binding, sim)) return {};
    Value other;
    if (rr.other_col >= 0) {
        other = ds.value(binding[rr.rule->other_slot], rr.other_col);
        if (!other) return {};
    } else {
        other = rr.rule->other_const;
    }
    std::vector<int> active;
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
        if (eval_op(rr.rule->viol_op, Value(candidates[i]), other, sim)) active.push_back(i);
    }
    return active;
}

}  // namespace

std::vector<Factor> ground_factors(const Dataset& dataset, const std::vector<Variable>& variables,
                                   const std::vector<DenialConstraint>& constraints,
                                   const std::vector<RelaxedRule>& rules,
                                   const PartitionPlan& plan, const GroundConfig& cfg,
                                   WeightTable& weights, std::vector<HardBinding>& hard_bindings,
                                   GroundStats& stats) {
    std::vector<Factor> out;
    const int cols = static_cast<int>(dataset.attribute_count());
    const bool want_hard = cfg.mode == GroundMode::Factors || cfg.mode == GroundMode::Both;
    const bool want_relaxed = cfg.mode == GroundMode::Feats || cfg.mode == GroundMode::Both;

    std::vector<BoundConstraint> bound;
    bound.reserve(constraints.size());
    for (std::size_t k = 0; k < constraints.size(); ++k)
        bound.push_back(bind_constraint(dataset, constraints[k], static_cast<int>(k)));

    // rules grouped by constraint, resolved against this dataset
    std::vector<std::vector<ResolvedRule>> rules_by_constraint(constraints.size());
    if (want_relaxed) {
        for (const auto& r : rules)
            rules_by_constraint[r.constraint_index].push_back(resolve_rule(dataset, r, weights));
    }

    int hard_weight_id = weights.intern(kHardDcWeightSig, false);
    weights.set(hard_weight_id, cfg.dc_weight);

    auto observed = [&](int row, int col) -> const Value& { return dataset.value(row, col); };

    auto ground_hard = [&](const BoundConstraint& bc, int a, int b) {
        std::vector<int> vars;
        for (auto [slot, col] : bc.cell_refs) {
            int row = slot == 0 ? a : b;
            vars.push_back(row * cols + col);
        }
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        bool all_evidence = true;
        for (int v : vars)
            if (variables[v].is_query) all_evidence = false;
        if (all_evidence && !binding_violates(bc, a, b, cfg.sim_threshold, observed)) {
            ++stats.hard_skipped;
            return;
        }
        Factor f;
        f.kind = FactorKind::HardDC;
        f.vars = std::move(vars);
        f.weight = hard_weight_id;
        f.hard = static_cast<int>(hard_bindings.size());
        hard_bindings.push_back({bc.index, a, bc.arity == 2 ? b : -1});
        out.push_back(std::move(f));
        ++stats.hard;
    };

    // identical relaxed groundings aggregate via a multiplicity
    std::map<std::tuple<int, int, std::vector<int>>, int> relaxed_agg;
    auto ground_relaxed = [&](const ResolvedRule& rr, int t1_row, int t2_row) {
        int vid = t1_row * cols + rr.target_col;
        const Variable& var = variables[vid];
        if (!var.is_query) return;
        int binding[2] = {t1_row, t2_row};
        auto active = relaxed_active(dataset, rr, var.candidates, binding, cfg.sim_threshold);
        if (active.empty()) return;
        ++relaxed_agg[{vid, rr.weight_id, std::move(active)}];
        ++stats.relaxed;
    };

    for (const TupleGroup& g : plan.groups) {
        const BoundConstraint& bc = bound[g.constraint];
        if (want_hard) {
            stats.hard_pair_bound += g.rows.size() * g.rows.size();
            if (bc.arity == 1) {
                for (int r : g.rows) ground_hard(bc, r, r);
            } else {
                for (std::size_t i = 0; i < g.rows.size(); ++i)
                    for (std::size_t j = i + 1; j < g.rows.size(); ++j)
                        ground_hard(bc, g.rows[i], g.rows[j]);
            }
        }
        if (want_relaxed) {
            const auto& rrs = rules_by_constraint[g.constraint];
            if (bc.arity == 1) {
                for (int r : g.rows)
                    for (const auto& rr : rrs) ground_relaxed(rr, r, r);
            } else {
                for (int a : g.rows)
                    for (int b : g.rows) {
                        if (a == b) continue;
                        for (const auto& rr : rrs) ground_relaxed(rr, a, b);
                    }
            }
        }
    }
    for (auto& [key, mult] : relaxed_agg) {
        Factor f;
        f.kind = FactorKind::RelaxedDC;
        f.vars = {std::get<0>(key)};
        f.weight = std::get<1>(key);
        f.active = std::get<2>(key);
        f.mult = mult;
        out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assembly

static void canonical_sort(std::vector<Factor>& factors, const WeightTable& weights,
                           const std::vector<HardBinding>& bindings) {
    std::sort(factors.begin(), factors.end(), [&](const Factor& a, const Factor& b) {
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        if (a.vars != b.vars) return a.vars < b.vars;
        const std::string& wa = weights.signature(a.weight);
        const std::string& wb = weights.signature(b.weight);
        if (wa != wb) return wa < wb;
        if (a.active != b.active) return a.active < b.active;
        if (a.mult != b.mult) return a.mult < b.mult;
        if (a.hard >= 0 && b.hard >= 0) {
            const HardBinding& ha = bindings[a.hard];
            const HardBinding& hb = bindings[b.hard];
            return std::tie(ha.constraint, ha.row_i, ha.row_j) <
                   std::tie(hb.constraint, hb.row_i, hb.row_j);
        }
        return false;
    });
}

FactorGraph ground(const Dataset& dataset, const DetectionResult& detection,
                   const DomainMap& domains, const std::vector<DenialConstraint>& constraints,
                   const PartitionPlan& plan, const std::vector<MatchedFact>& facts,
                   const GroundConfig& cfg) {
    return ground(dataset, detection, domains, constraints, plan, plan, facts, cfg);
}

FactorGraph ground(const Dataset& dataset, const DetectionResult& detection,
                   const DomainMap& domains, const std::vector<DenialConstraint>& constraints,
                   const PartitionPlan& hard_plan, const PartitionPlan& relaxed_plan,
                   const std::vector<MatchedFact>& facts, const GroundConfig& cfg) {
    FactorGraph g;
    g.cols = static_cast<int>(dataset.attribute_count());
    g.sim_threshold = cfg.sim_threshold;
    g.constraints = constraints;
    for (std::size_t k = 0; k < constraints.size(); ++k)
        g.bound_constraints.push_back(bind_constraint(dataset, constraints[k], static_cast<int>(k)));
    g.variables = build_variables(dataset, detection, domains);
    for (const Variable& v : g.variables)
        if (v.is_query) g.query_vars.push_back(v.id);

    int prior_id = g.weights.intern(kPriorWeightSig, false);
    g.weights.set(prior_id, cfg.prior_weight);

    std::vector<RelaxedRule> rules;
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        auto rs = relax_dc(constraints[k], static_cast<int>(k));
        rules.insert(rules.end(), rs.begin(), rs.end());
    }

    g.factors = extract_features(dataset, g.variables, facts, g.weights);
    g.stats.prior = std::count_if(g.factors.begin(), g.factors.end(),
                                  [](const Factor& f) { return f.kind == FactorKind::Prior; });
    g.stats.dict = std::count_if(g.factors.begin(), g.factors.end(),
                                 [](const Factor& f) { return f.kind == FactorKind::Dict; });
    g.stats.cooc = g.factors.size() - g.stats.prior - g.stats.dict;

    const bool want_hard = cfg.mode == GroundMode::Factors || cfg.mode == GroundMode::Both;
    const bool want_relaxed = cfg.mode == GroundMode::Feats || cfg.mode == GroundMode::Both;
    if (want_hard) {
        GroundConfig hard_cfg = cfg;
        hard_cfg.mode = GroundMode::Factors;
        auto fs = ground_factors(dataset, g.variables, constraints, rules, hard_plan, hard_cfg,
                                 g.weights, g.hard_bindings, g.stats);
        g.factors.insert(g.factors.end(), std::make_move_iterator(fs.begin()),
                         std::make_move_iterator(fs.end()));
    }
    if (want_relaxed) {
        GroundConfig relaxed_cfg = cfg;
        relaxed_cfg.mode = GroundMode::Feats;
        auto fs = ground_factors(dataset, g.variables, constraints, rules, relaxed_plan,
                                 relaxed_cfg, g.weights, g.hard_bindings, g.stats);
        g.factors.insert(g.factors.end(), std::make_move_iterator(fs.begin()),
                         std::make_move_iterator(fs.end()));
    }
    canonical_sort(g.factors, g.weights, g.hard_bindings);
    return g;
}

// ---------------------------------------------------------------------------
// Training examples

std::vector<TrainingExample> build_training_set(const Dataset& dataset, const CoocTable& cooc,
                                                const DetectionResult& detection,
                                                const std::vector<RelaxedRule>& rules,
                                                const std::vector<MatchedFact>& facts,
                                                const TrainingConfig& cfg, WeightTable& weights) {
    const int rows = static_cast<int>(dataset.tuple_count());
    const int cols = static_cast<int>(dataset.attribute_count());
    FactIndex fidx = index_facts(facts);
    int prior_id = weights.intern(kPriorWeightSig, false);
    weights.set(prior_id, cfg.prior_weight);

    // eligible cells in canonical order
    std::vector<Cell> eligible;
    for (const Cell& c : detection.clean) {
        if (dataset.active_domain(c.col).size() < 2) continue;
        if (!dataset.value(c)) continue;  // no label for NULL-initial cells
        eligible.push_back(c);
    }
    if (eligible.size() > cfg.cap) {
        std::mt19937_64 rng(cfg.seed);
        std::shuffle(eligible.begin(), eligible.end(), rng);
        eligible.resize(cfg.cap);
        std::sort(eligible.begin(), eligible.end());
    }

    const bool want_relaxed = cfg.mode != GroundMode::Factors;
    std::vector<std::vector<ResolvedRule>> rules_by_col(cols);
    if (want_relaxed) {
        for (const auto& r : rules) {
            ResolvedRule rr = resolve_rule(dataset, r, weights);
            rules_by_col[rr.target_col].push_back(rr);
        }
    }

    std::vector<TrainingExample> out;
    out.reserve(eligible.size());
    for (const Cell& cell : eligible) {
        TrainingExample ex;
        ex.cell = cell;
        CandidateDomain dom = candidates_for_cell(dataset, cooc, cell, cfg.tau);
        ex.candidates = std::move(dom.candidates);
        ex.label = dom.initial_index;
        if (ex.candidates.size() >= 2) {
            // singleton examples contribute zero gradient; skip their factors
            std::map<std::pair<int, std::vector<int>>, int> agg;
            emit_unary_features(dataset, cell, ex.candidates, dom.initial_index, fidx, prior_id,
                                weights, [&](FactorKind, int w, std::vector<int> active) {
                                    ++agg[{w, std::move(active)}];
                                });
            for (const auto& rr : rules_by_col[cell.col]) {
                if (rr.rule->arity == 1) {
                    int binding[2] = {cell.row, cell.row};
                    auto active = relaxed_active(dataset, rr, ex.candidates, binding,
                                                 cfg.sim_threshold);
                    if (!active.empty()) ++agg[{rr.weight_id, std::move(active)}];
                    continue;
                }
                for (int partner = 0; partner < rows; ++partner) {
                    if (partner == cell.row) continue;
                    int binding[2] = {cell.row, partner};
                    auto active = relaxed_active(dataset, rr, ex.candidates, binding,
                                                 cfg.sim_threshold);
                    if (!active.empty()) ++agg[{rr.weight_id, std::move(active)}];
                }
            }
            for (auto& [key, mult] : agg)
                ex.factors.push_back({key.first, key.second, mult});
        }
        out.push_back(std::move(ex));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Debug listing

std::string describe_rules(const std::vector<DenialConstraint>& constraints,
                           const std::vector<RelaxedRule>& rules, const GroundStats& stats) {
    std::ostringstream os;
    os << "constraints:\n";
    for (const auto& dc : constraints) os << "  " << dc.id << ": " << render_dc(dc) << "\n";
    os << "relaxed rules:\n";
    for (const auto& r : rules) {
        os << "  [" << r.constraint_id << " p" << r.predicate_pos << "] penalize t1."
           << r.target_attr << " " << op_name(r.viol_op) << " ";
        if (r.other_slot >= 0)
            os << "init(t" << r.other_slot + 1 << "." << r.other_attr << ")";
        else
            os << '"' << r.other_const.value_or("") << '"';
        os << " when";
        if (r.body.empty()) os << " (always)";
        for (const auto& c : r.body) {
            os << " " << op_name(c.op) << "(";
            auto side = [&](int slot, const std::string& attr, const Value& cv) {
                if (slot >= 0)
                    os << "init(t" << slot + 1 << "." << attr << ")";
                else
                    os << '"' << cv.value_or("") << '"';
            };
            side(c.lhs_slot, c.lhs_attr, c.lhs_const);
            os << ",";
            side(c.rhs_slot, c.rhs_attr, c.rhs_const);
            os << ")";
        }
        os << "\n";
    }
    os << "factors: cooc=" << stats.cooc << " prior=" << stats.prior << " dict=" << stats.dict
       << " relaxed=" << stats.relaxed << " hard=" << stats.hard
       << " (skipped " << stats.hard_skipped << ", pair bound " << stats.hard_pair_bound << ")\n";
    return os.str();
}

}  // namespace holorepair
