#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "causalfront/causal_graph.hpp"
#include "causalfront/metrics.hpp"
#include "causalfront/pareto_front.hpp"
#include "causalfront/rng.hpp"

namespace causalfront {

struct EvolutionConfig {
    int mu = 300;
    int lambda = 300;
    double p_crossover = 0.1;
    double p_mutation = 0.9;
    double mutation_sigma = 0.1;
    double per_node_swap_prob = 0.5;
    int generations = 400;
    std::uint64_t seed = 0;
    int threads = 1;                  // 0 = hardware concurrency
    bool keep_both_offspring = false; // keep I2 after crossover as well
    int checkpoint_every = 0;         // generations between checkpoint hooks, 0 = off

    void validate() const;  // throws std::invalid_argument
};

// Breaking near-equal TVD ties in lexicographic selection.
constexpr double kLexTvdTolerance = 1e-9;

// Fresh individual: uniform [0,1) draws, each leading-index column renormalized.
Individual create_individual(const CausalGraph& g, RngStream& rng);

// Exchange the two individuals' tensors node-by-node with the given
// probability. Fitness metadata is cleared.
void crossover(Individual& i1, Individual& i2, double per_node_swap_prob, RngStream& rng);

// Perturb one uniformly chosen tensor element by a zero-mean Gaussian, clip to
// [0,1] and renormalize its column. An all-zero column becomes uniform.
void mutate(const CausalGraph& g, Individual& ind, double sigma, RngStream& rng);

// Computes fitness vectors (TVD, then one causal influence per penalized
// edge). The frequency table is canonicalized to the graph's observable order
// at construction.
class Evaluator {
public:
    Evaluator(const CausalGraph& g, FrequencyTable freq, std::vector<Edge> penalized);

    FitnessVector evaluate(const Individual& ind) const;
    void annotate(Individual& ind) const;  // evaluate unless cached for these objectives

    const CausalGraph& graph() const { return *graph_; }
    const FrequencyTable& frequencies() const { return freq_; }
    const std::vector<Edge>& penalized() const { return penalized_; }
    const std::shared_ptr<const std::vector<std::string>>& objective_names() const {
        return names_;
    }
    std::size_t objective_count() const { return names_->size(); }

private:
    const CausalGraph* graph_;
    FrequencyTable freq_;
    std::vector<Edge> penalized_;
    std::shared_ptr<const std::vector<std::string>> names_;
};

// Non-domination rank per individual (0 = non-dominated), fast sort.
std::vector<int> nondominated_ranks(std::span<const FitnessVector> fitnesses);

// NSGA-II crowding distances for the given members (indices into fitnesses).
std::vector<double> crowding_distances(std::span<const FitnessVector> fitnesses,
                                       std::span<const int> members);

// Standard NSGA-II environmental selection: fill whole ranks, break the last
// rank by descending crowding distance. All individuals must carry fitness.
std::vector<Individual> nsga2_select(std::vector<Individual> pool, int mu);

// Order used by lexicographic (extreme-point) runs: ascending TVD, with
// near-equal TVD groups (within kLexTvdTolerance of the group head) ordered by
// the second objective.
std::vector<int> lexicographic_order(std::span<const FitnessVector> fitnesses);

enum class SelectionMode { Nsga2, Lexicographic };

struct RunHooks {
    std::atomic<bool>* stop = nullptr;
    std::function<void(int, const ParetoFront&, const EpsilonArchive&)> on_checkpoint;
    // Called for every evaluated individual, in deterministic order.
    std::function<void(const Individual&, const FitnessVector&)> on_individual;
    const std::vector<Individual>* initial_population = nullptr;
};

struct EvolutionResult {
    ParetoFront front;
    EpsilonArchive archive;
    std::vector<Individual> population;
    std::size_t evaluations = 0;
    int generations_run = 0;
};

// (mu + lambda) generation loop: per offspring slot draw two parents uniformly
// at random, crossover with p_crossover else mutate with p_mutation else pass
// through, keep the first of the pair. Selected populations feed the global
// Pareto front; every evaluated individual is offered to the epsilon archive.
EvolutionResult run_evolution(const CausalGraph& g, const FrequencyTable& freq,
                              const EvolutionConfig& config,
                              SelectionMode mode = SelectionMode::Nsga2,
                              const RunHooks& hooks = {});

}  // namespace causalfront
