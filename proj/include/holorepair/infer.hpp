#pragma once

#include <cstdint>
#include <vector>

#include "holorepair/ground.hpp"

namespace holorepair {

/// Per-query-variable distributions, aligned with FactorGraph::query_vars
/// and each variable's candidate order. Every row sums to 1.
struct MarginalTable {
    std::vector<int> vars;
    std::vector<std::vector<double>> probs;

    const std::vector<double>* row_for(int var) const {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == var) return &probs[i];
        return nullptr;
    }
};

struct LearnConfig {
    int epochs = 20;
    double lr = 0.1;
    double l2 = 1e-4;
    uint64_t seed = 42;
};

/// Single-example SGD over the L2-regularized negative log-likelihood of the
/// training cells (softmax over each cell's candidates, scores summed from
/// its unary factors). Fixed weights are untouched. Deterministic given the
/// seed. With no usable training example the learnable weights stay zero and
/// a warning is printed.
void learn_weights(const std::vector<TrainingExample>& examples, WeightTable& weights,
                   const LearnConfig& cfg);

/// Full-batch loss and gradient (gradient only over learnable weights).
/// Used by gradient checks and by plain gradient descent.
double nll_and_gradient(const std::vector<TrainingExample>& examples, const WeightTable& weights,
                        double l2, std::vector<double>* grad_out);

struct SampleConfig {
    int samples = 20000;
    int burnin = 2000;
    uint64_t seed = 42;
    int chains = 1;
};

/// Systematic-scan Gibbs over the query variables; evidence stays fixed.
/// One sample is one full sweep; marginals are post-burn-in frequencies.
/// Chains run with derived seeds and their counts are summed by chain index.
MarginalTable gibbs_marginals(const FactorGraph& graph, const SampleConfig& cfg);

/// Full enumeration of the joint assignment space. Refuses when the product
/// of query-variable domain sizes exceeds 1e6.
MarginalTable exact_marginals(const FactorGraph& graph);

/// Per-variable softmax over unary factor scores. Precondition: no factor
/// touches more than one variable.
MarginalTable closed_form_marginals(const FactorGraph& graph);

inline constexpr double kExactStateBound = 1e6;

}  // namespace holorepair
