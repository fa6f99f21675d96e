#pragma once

#include <memory>
#include <string>
#include <vector>

#include "causalfront/evolution.hpp"

namespace causalfront {

// One island: an evolution on a graph variant that keeps only a subset of the
// full graph's penalized edges. Seeds come fresh, from earlier islands'
// pooled populations (transplanted), or from the global archive.
struct IslandSpec {
    std::string id;
    std::vector<Edge> kept_edges;
    SelectionMode mode = SelectionMode::Nsga2;
    Edge lex_edge;                       // tie-break objective for Lexicographic mode
    std::vector<std::string> seed_from;  // ids of earlier islands
    bool seed_from_archive = false;
    int take_best = 0;                   // NSGA-II-selected seed cap, 0 = all
    int population = 300;
    int runs = 1;
    int generations = 400;
};

// Stage-k islands may only source populations from stages < k; stages run as
// sequential barriers.
struct IslandStage {
    std::vector<IslandSpec> islands;
    std::size_t skip_if_archive_at_least = 0;  // 0 = never skip
};

struct IslandPlan {
    std::vector<IslandStage> stages;
};

// The staged recipe for the full graph: per repetition, extreme-point islands
// (min TVD on the edge-free graph, one lexicographic island per penalized
// edge) feed per-edge 2D islands; repetitions stop once the archive holds
// archive_target members; a final island evolves the full problem seeded from
// the archive. All sizes scale multiplicatively.
IslandPlan default_island_plan(const CausalGraph& full_graph, double scale = 1.0,
                               int repetitions = 5);

// Single-objective evolution preferring, among near-equal TVD, the lower
// causal influence on `edge`. Returns the final population.
std::vector<Individual> lexicographic_evolve(const CausalGraph& g, const FrequencyTable& freq,
                                             const Edge& edge, const EvolutionConfig& config);

// Map individuals onto a graph extended by penalized edges: tensors of nodes
// with new parents are replicated across the new parent indices, so added
// edges carry exactly zero causal influence and the observable joint is
// unchanged.
Individual transplant(const Individual& ind, const CausalGraph& from, const CausalGraph& to);
std::vector<Individual> transplant(std::span<const Individual> pop, const CausalGraph& from,
                                   const CausalGraph& to);

struct IslandLog {
    std::string id;
    int runs = 0;
    std::size_t evaluations = 0;
    std::vector<double> best_objectives;  // per island objective, pooled over runs
    bool converged = true;                // false when a run produced no front points
};

struct IslandPlanResult {
    ParetoFront front;        // full-graph objective space
    EpsilonArchive archive;   // full-graph objective space
    std::size_t evaluations = 0;
    std::vector<IslandLog> logs;
};

struct IslandPlanHooks {
    std::atomic<bool>* stop = nullptr;
    // Receives full-graph members as they are offered to the global archive.
    std::function<void(const Individual&, const FitnessVector&)> on_individual;
    // Called after each stage with the stage index.
    std::function<void(std::size_t, const IslandPlanResult&)> on_stage_done;
    // Merge target across plan repetitions; when set, offers go there as well.
    EpsilonArchive* shared_archive = nullptr;
};

IslandPlanResult run_island_plan(const CausalGraph& full_graph, const FrequencyTable& freq,
                                 const IslandPlan& plan, const EvolutionConfig& base_config,
                                 const IslandPlanHooks& hooks = {});

}  // namespace causalfront
