#pragma once

#include <span>
#include <string>
#include <vector>

#include "causalfront/causal_graph.hpp"
#include "causalfront/fitness.hpp"
#include "causalfront/tensor.hpp"

namespace causalfront {

// Empirical joint frequencies over the observable variables.
struct FrequencyTable {
    std::vector<std::string> observable_vars;
    Tensor values;
    bool normalized = true;
};

// Scales entries to sum 1; throws if the table is all zero.
void normalize(FrequencyTable& table);

// Same table with axes permuted into `order` (a permutation of observable_vars).
FrequencyTable reorder(const FrequencyTable& table, std::span<const std::string> order);

// Unconditional model distribution viewed as a frequency table.
FrequencyTable to_frequency_table(const DistributionTensor& dist);

// Marginal of `table` over `keep`, in the order the variables appear in `keep`.
Tensor marginal_of(const FrequencyTable& table, std::span<const std::string> keep);

// Total variational distance sum_cells |Pr(cell|M) - F(cell)|, in [0,2].
// Requires identical variable sets and index order.
double tvd(const DistributionTensor& model_joint, const FrequencyTable& freq);
double tvd(const FrequencyTable& a, const FrequencyTable& b);

struct InfluenceResult {
    double value = 0.0;
    bool degenerate = false;  // no feasible assignment pair existed
    // Maximizing witness, for diagnostics only.
    int source_value = -1;
    int source_value_alt = -1;
    std::vector<int> conditioning_assignment;
};

// Parents of edge.to that are neither grandparents of edge.to nor edge.from,
// in graph node order. This is the conditioning set of the influence measure.
std::vector<std::string> influence_conditioning_set(const CausalGraph& g, const Edge& edge);

// Causal influence of edge.from on edge.to for a model: max over feasible
// (v, v', conditioning assignment) of || Pr(to | from=v, K) - Pr(to | from=v', K) ||_1
// with K = influence_conditioning_set and everything else marginalized.
InfluenceResult causal_influence_model(const CausalGraph& g, const Individual& ind,
                                       const Edge& edge);

// Same quantity computed from an empirical table, conditioning on the given
// observable variables. Feasibility requires F(from, conditioning) above the
// feasibility threshold.
InfluenceResult causal_influence_empirical(const FrequencyTable& freq, const Edge& edge,
                                           std::span<const std::string> conditioning);

// Dominance predicates over fitness vectors (minimization). Throws when the
// objective lists differ.
bool dominates(const FitnessVector& f1, const FitnessVector& f2);         // <= everywhere
bool dominates_strictly(const FitnessVector& f1, const FitnessVector& f2);

}  // namespace causalfront
