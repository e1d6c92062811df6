#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "holorepair/constraints.hpp"
#include "holorepair/dataset.hpp"
#include "holorepair/detect.hpp"
#include "holorepair/domain.hpp"
#include "holorepair/extdict.hpp"

namespace holorepair {

// ---------------------------------------------------------------------------
// Partition plan

struct TupleGroup {
    int constraint = -1;
    std::vector<int> rows;  // sorted
};

/// Per constraint: connected components of the constraint's subgraph of the
/// conflict hypergraph, projected to tuples. Groups of one constraint are
/// tuple-disjoint.
struct PartitionPlan {
    std::vector<TupleGroup> groups;

    /// One group per constraint holding every tuple (grounding without
    /// partitioning, for comparisons).
    static PartitionPlan trivial(const Dataset& dataset, std::size_t n_constraints);
};

PartitionPlan partition_groups(const ConflictHypergraph& graph, std::size_t n_constraints);

// ---------------------------------------------------------------------------
// Variables

struct Variable {
    int id = -1;  // canonical: row * attribute_count + col
    Cell cell;
    bool is_query = false;
    std::vector<std::string> candidates;  // evidence: the observed value alone
    int initial_index = -1;               // -1 when the initial value is NULL
    Value observed;
};

/// One variable per cell. Clean cells are evidence fixed at their observed
/// value; noisy cells with singleton candidate sets are demoted to evidence;
/// the rest are query variables. Throws when a noisy cell has no entry in
/// `domains`.
std::vector<Variable> build_variables(const Dataset& dataset, const DetectionResult& detection,
                                      const DomainMap& domains);

// ---------------------------------------------------------------------------
// Weights

/// Weight keys are canonical signature strings:
///   feature   F|attr|candidate|feature-attr|feature-value
///   source    F|attr|candidate|__src__|source-id
///   dict      D|dict-id
///   relaxed   R|constraint-id|predicate-position
///   prior     P     (fixed)
///   hard dc   H     (fixed)
class WeightTable {
public:
    int intern(const std::string& signature, bool learnable);
    int find(const std::string& signature) const;  // -1 when absent
    double value(int id) const { return values_[id]; }
    void set(int id, double v) { values_[id] = v; }
    bool learnable(int id) const { return learnable_[id] != 0; }
    const std::string& signature(int id) const { return sigs_[id]; }
    std::size_t size() const { return values_.size(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
    std::vector<uint8_t> learnable_;
    std::vector<std::string> sigs_;
    std::unordered_map<std::string, int> index_;
};

std::string feature_weight_sig(const std::string& attr, const std::string& candidate,
                               const std::string& feat_attr, const std::string& feat_value);
std::string dict_weight_sig(const std::string& dict_id);
std::string relaxed_weight_sig(const std::string& constraint_id, int predicate_pos);
inline constexpr const char* kPriorWeightSig = "P";
inline constexpr const char* kHardDcWeightSig = "H";

// ---------------------------------------------------------------------------
// Factors

enum class FactorKind { Cooc, Prior, Dict, RelaxedDC, HardDC };

/// Unary kinds activate (h = 1) on the listed candidate indices of vars[0]
/// and are 0 elsewhere. HardDC evaluates the bound constraint on the joint
/// assignment: h = +1 when satisfied, -1 when violated. Identical relaxed
/// groundings from different tuple pairs aggregate into one factor with a
/// multiplicity.
struct Factor {
    FactorKind kind = FactorKind::Cooc;
    std::vector<int> vars;
    int weight = -1;
    std::vector<int> active;  // unary kinds; sorted candidate indices
    int hard = -1;            // HardDC: index into FactorGraph::hard_bindings
    int mult = 1;
};

struct HardBinding {
    int constraint = -1;
    int row_i = -1;
    int row_j = -1;  // -1 for arity-1
};

// ---------------------------------------------------------------------------
// Relaxed rules

/// A condition evaluated on initial values when a relaxed rule is grounded.
struct RelaxedCond {
    Op op = Op::EQ;
    int lhs_slot = -1;  // -1: constant
    std::string lhs_attr;
    Value lhs_const;
    int rhs_slot = -1;
    std::string rhs_attr;
    Value rhs_const;
};

/// One rule per cell-valued predicate position of a denial constraint: the
/// target keeps its predicate as the violating-value expression, every other
/// cell reference becomes an initial-value lookup. Targets are canonicalized
/// onto slot t1; duplicates under the t1/t2 swap are removed.
struct RelaxedRule {
    std::string constraint_id;
    int constraint_index = -1;
    int predicate_pos = 0;  // weight-tying key
    int arity = 2;
    std::string target_attr;  // target cell is (t1, target_attr)
    Op viol_op = Op::EQ;      // candidate  viol_op  other-operand
    int other_slot = -1;      // -1: constant operand
    std::string other_attr;
    Value other_const;
    std::vector<RelaxedCond> body;
};

std::vector<RelaxedRule> relax_dc(const DenialConstraint& dc, int constraint_index);

// ---------------------------------------------------------------------------
// Grounding

enum class GroundMode { Feats, Factors, Both };

struct GroundConfig {
    GroundMode mode = GroundMode::Feats;
    double sim_threshold = 0.8;
    double prior_weight = 1.0;
    double dc_weight = 10.0;
};

struct GroundStats {
    std::size_t cooc = 0, prior = 0, dict = 0, relaxed = 0, hard = 0;
    std::size_t hard_skipped = 0;     // all-evidence satisfied bindings
    std::size_t hard_pair_bound = 0;  // sum over groups of |g|^2
};

/// The complete grounded model. Variable ids are row * cols + col; factors
/// are canonically ordered; every factor's weight id is interned in
/// `weights`.
struct FactorGraph {
    std::vector<Variable> variables;
    std::vector<int> query_vars;  // ids in canonical order
    std::vector<Factor> factors;
    std::vector<HardBinding> hard_bindings;
    std::vector<DenialConstraint> constraints;       // for HardDC evaluation
    std::vector<BoundConstraint> bound_constraints;  // columns resolved
    int cols = 0;
    double sim_threshold = 0.8;
    WeightTable weights;
    GroundStats stats;

    const Variable& var(int id) const { return variables[id]; }
    int var_id(Cell c) const { return c.row * cols + c.col; }
};

/// COOC features from same-tuple co-cell values (plus a source feature when
/// provenance exists), the minimality prior on the initial value, and one
/// dictionary factor per in-domain matched fact. Emitted for query
/// variables only.
std::vector<Factor> extract_features(const Dataset& dataset,
                                     const std::vector<Variable>& variables,
                                     const std::vector<MatchedFact>& facts,
                                     WeightTable& weights);

/// Constraint factors, restricted to the plan's tuple groups. Factors mode
/// grounds one HardDC factor per within-group unordered pair (arity-2) or
/// per tuple (arity-1); feats mode grounds relaxed rules against initial
/// values; both emits both kinds.
std::vector<Factor> ground_factors(const Dataset& dataset, const std::vector<Variable>& variables,
                                   const std::vector<DenialConstraint>& constraints,
                                   const std::vector<RelaxedRule>& rules,
                                   const PartitionPlan& plan, const GroundConfig& cfg,
                                   WeightTable& weights, std::vector<HardBinding>& hard_bindings,
                                   GroundStats& stats);

/// Assemble the full graph for a dataset; `plan` restricts both factor
/// kinds.
FactorGraph ground(const Dataset& dataset, const DetectionResult& detection,
                   const DomainMap& domains, const std::vector<DenialConstraint>& constraints,
                   const PartitionPlan& plan, const std::vector<MatchedFact>& facts,
                   const GroundConfig& cfg);

/// Same, with separate plans: hard factors stay inside conflict groups
/// while relaxed features can ground over the whole table, matching how the
/// training examples see them.
FactorGraph ground(const Dataset& dataset, const DetectionResult& detection,
                   const DomainMap& domains, const std::vector<DenialConstraint>& constraints,
                   const PartitionPlan& hard_plan, const PartitionPlan& relaxed_plan,
                   const std::vector<MatchedFact>& facts, const GroundConfig& cfg);

// ---------------------------------------------------------------------------
// Training examples

struct TrainingFactor {
    int weight = -1;
    std::vector<int> active;
    int mult = 1;  // identical groundings aggregated
};

struct TrainingExample {
    Cell cell;
    std::vector<std::string> candidates;
    int label = -1;
    std::vector<TrainingFactor> factors;
};

struct TrainingConfig {
    double tau = 0.5;
    std::size_t cap = 5000;
    uint64_t seed = 42;
    GroundMode mode = GroundMode::Feats;
    double sim_threshold = 0.8;
    double prior_weight = 1.0;
};

/// One example per clean cell whose attribute has at least two active-domain
/// values and whose observed value is non-NULL. Candidate sets are built as
/// if the cell were noisy; unary factors mirror the grounding templates,
/// with relaxed rules grounded against the full table (partition groups
/// cover only violating tuples, which are never clean). Uniform seeded
/// subsampling caps the example count.
std::vector<TrainingExample> build_training_set(const Dataset& dataset, const CoocTable& cooc,
                                                const DetectionResult& detection,
                                                const std::vector<RelaxedRule>& rules,
                                                const std::vector<MatchedFact>& facts,
                                                const TrainingConfig& cfg, WeightTable& weights);

/// Debug listing of constraints, relaxed rules, and factor counts.
std::string describe_rules(const std::vector<DenialConstraint>& constraints,
                           const std::vector<RelaxedRule>& rules, const GroundStats& stats);

}  // namespace holorepair
