#include "causalfront/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace causalfront {

namespace {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min<int>(threads, static_cast<int>(n));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

// Renormalize the leading-index column containing flat element `f`;
// an all-zero column becomes uniform.
void renormalize_column(Tensor& t, std::size_t f) {
    const std::size_t cols = t.size() / static_cast<std::size_t>(t.shape[0]);
    const std::size_t c = f % cols;
    double s = 0;
    for (int j = 0; j < t.shape[0]; ++j) s += t.v[j * cols + c];
    if (s <= 0.0) {
        const double u = 1.0 / t.shape[0];
        for (int j = 0; j < t.shape[0]; ++j) t.v[j * cols + c] = u;
    } else {
        for (int j = 0; j < t.shape[0]; ++j) t.v[j * cols + c] /= s;
    }
}

}  // namespace

void EvolutionConfig::validate() const {
    if (mu < 1 || lambda < 1) throw std::invalid_argument("mu and lambda must be positive");
    if (p_crossover < 0 || p_crossover > 1 || p_mutation < 0 || p_mutation > 1 ||
        p_crossover + p_mutation > 1.0 + 1e-12)
        throw std::invalid_argument("operator probabilities must lie in [0,1] and sum to at most 1");
    if (!(mutation_sigma > 0)) throw std::invalid_argument("mutation_sigma must be positive");
    if (per_node_swap_prob < 0 || per_node_swap_prob > 1)
        throw std::invalid_argument("per_node_swap_prob must lie in [0,1]");
    if (generations < 0) throw std::invalid_argument("generations must be non-negative");
    if (threads < 0) throw std::invalid_argument("threads must be non-negative");
    if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be non-negative");
}

Individual create_individual(const CausalGraph& g, RngStream& rng) {
    Individual ind;
    ind.tensors.reserve(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
        Tensor t(g.tensor_shape(i));
        const std::size_t cols = t.size() / static_cast<std::size_t>(t.shape[0]);
        for (std::size_t c = 0; c < cols; ++c) {
            double s = 0;
            do {
                s = 0;
                for (int j = 0; j < t.shape[0]; ++j) {
                    const double u = rng.uniform();
                    t.v[j * cols + c] = u;
                    s += u;
                }
            } while (s <= 0.0);
            for (int j = 0; j < t.shape[0]; ++j) t.v[j * cols + c] /= s;
        }
        ind.tensors.push_back(std::move(t));
    }
    return ind;
}

void crossover(Individual& i1, Individual& i2, double per_node_swap_prob, RngStream& rng) {
    if (i1.tensors.size() != i2.tensors.size())
        throw std::invalid_argument("crossover requires individuals on the same graph");
    for (std::size_t n = 0; n < i1.tensors.size(); ++n) {
        if (i1.tensors[n].shape != i2.tensors[n].shape)
            throw std::invalid_argument("crossover requires individuals on the same graph");
        if (rng.uniform() < per_node_swap_prob) std::swap(i1.tensors[n], i2.tensors[n]);
    }
    i1.fitness.reset();
    i2.fitness.reset();
}

void mutate(const CausalGraph& g, Individual& ind, double sigma, RngStream& rng) {
    const int node = rng.uniform_int(g.node_count());
    Tensor& t = ind.tensors[node];
    const std::size_t f = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(t.size())));
    double v = t.v[f] + rng.normal(sigma);
    t.v[f] = std::clamp(v, 0.0, 1.0);
    renormalize_column(t, f);
    ind.fitness.reset();
}

Evaluator::Evaluator(const CausalGraph& g, FrequencyTable freq, std::vector<Edge> penalized)
    : graph_(&g), penalized_(std::move(penalized)) {
    if (!freq.normalized) normalize(freq);
    freq_ = reorder(freq, g.observable_names());
    auto names = std::make_shared<std::vector<std::string>>();
    names->push_back("TVD");
    for (const auto& e : penalized_) {
        if (!g.has_edge(g.index_of(e.from), g.index_of(e.to)))
            throw std::invalid_argument("penalized edge not in graph: " + edge_label(e));
        names->push_back("C[" + edge_label(e) + "]");
    }
    names_ = std::move(names);
}

FitnessVector Evaluator::evaluate(const Individual& ind) const {
    FitnessVector f;
    f.names = names_;
    f.values.reserve(names_->size());
    f.values.push_back(tvd(observable_joint(*graph_, ind), freq_));
    for (const auto& e : penalized_)
        f.values.push_back(causal_influence_model(*graph_, ind, e).value);
    return f;
}

void Evaluator::annotate(Individual& ind) const {
    if (ind.fitness && ind.fitness->names && *ind.fitness->names == *names_) return;
    ind.fitness = evaluate(ind);
}

std::vector<int> nondominated_ranks(std::span<const FitnessVector> fitnesses) {
    const int n = static_cast<int>(fitnesses.size());
    std::vector<std::vector<int>> dominated_by(n);
    std::vector<int> domination_count(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (strictly_dominates(fitnesses[i], fitnesses[j])) {
                dominated_by[i].push_back(j);
                ++domination_count[j];
            } else if (strictly_dominates(fitnesses[j], fitnesses[i])) {
                dominated_by[j].push_back(i);
                ++domination_count[i];
            }
        }
    std::vector<int> rank(n, -1);
    std::vector<int> current;
    for (int i = 0; i < n; ++i)
        if (domination_count[i] == 0) current.push_back(i);
    int r = 0;
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current) {
            rank[i] = r;
            for (int j : dominated_by[i])
                if (--domination_count[j] == 0) next.push_back(j);
        }
        current = std::move(next);
        ++r;
    }
    return rank;
}

std::vector<double> crowding_distances(std::span<const FitnessVector> fitnesses,
                                       std::span<const int> members) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(members.size(), 0.0);
    if (members.empty()) return dist;
    const std::size_t n_obj = fitnesses[members[0]].size();
    std::vector<int> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = 0; k < n_obj; ++k) {
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fitnesses[members[a]].values[k] < fitnesses[members[b]].values[k];
        });
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        const double span = fitnesses[members[order.back()]].values[k] -
                            fitnesses[members[order.front()]].values[k];
        if (span <= 0) continue;
        for (std::size_t i = 1; i + 1 < order.size(); ++i) {
            if (dist[order[i]] == inf) continue;
            dist[order[i]] += (fitnesses[members[order[i + 1]]].values[k] -
                               fitnesses[members[order[i - 1]]].values[k]) /
                              span;
        }
    }
    return dist;
}

std::vector<Individual> nsga2_select(std::vector<Individual> pool, int mu) {
    if (static_cast<int>(pool.size()) < mu)
        throw std::invalid_argument("selection pool smaller than mu");
    std::vector<FitnessVector> fitnesses;
    fitnesses.reserve(pool.size());
    for (const auto& ind : pool) {
        if (!ind.fitness) throw std::invalid_argument("unevaluated individual in selection pool");
        fitnesses.push_back(*ind.fitness);
    }
    const auto ranks = nondominated_ranks(fitnesses);
    const int max_rank = *std::max_element(ranks.begin(), ranks.end());

    std::vector<int> chosen;
    chosen.reserve(mu);
    for (int r = 0; r <= max_rank && static_cast<int>(chosen.size()) < mu; ++r) {
        std::vector<int> members;
        for (std::size_t i = 0; i < ranks.size(); ++i)
            if (ranks[i] == r) members.push_back(static_cast<int>(i));
        if (static_cast<int>(chosen.size() + members.size()) <= mu) {
            chosen.insert(chosen.end(), members.begin(), members.end());
            continue;
        }
        const auto crowd = crowding_distances(fitnesses, members);
        std::vector<int> order(members.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return crowd[a] > crowd[b]; });
        for (int i : order) {
            if (static_cast<int>(chosen.size()) == mu) break;
            chosen.push_back(members[i]);
        }
    }
    std::vector<Individual> out;
    out.reserve(mu);
    for (int i : chosen) out.push_back(std::move(pool[i]));
    return out;
}

std::vector<int> lexicographic_order(std::span<const FitnessVector> fitnesses) {
    std::vector<int> order(fitnesses.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return fitnesses[a].values[0] < fitnesses[b].values[0];
    });
    // Greedy clusters of near-equal TVD, each ordered by the tie-break objective.
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        const double head = fitnesses[order[start]].values[0];
        while (end < order.size() && fitnesses[order[end]].values[0] - head <= kLexTvdTolerance)
            ++end;
        if (fitnesses[order[start]].size() > 1)
            std::stable_sort(order.begin() + start, order.begin() + end, [&](int a, int b) {
                return fitnesses[a].values[1] < fitnesses[b].values[1];
            });
        start = end;
    }
    return order;
}

namespace {

std::vector<Individual> lexicographic_select(std::vector<Individual> pool, int mu) {
    std::vector<FitnessVector> fitnesses;
    fitnesses.reserve(pool.size());
    for (const auto& ind : pool) fitnesses.push_back(*ind.fitness);
    const auto order = lexicographic_order(fitnesses);
    std::vector<Individual> out;
    out.reserve(mu);
    for (int i = 0; i < mu; ++i) out.push_back(std::move(pool[order[i]]));
    return out;
}

}  // namespace

EvolutionResult run_evolution(const CausalGraph& g, const FrequencyTable& freq,
                              const EvolutionConfig& config, SelectionMode mode,
                              const RunHooks& hooks) {
    config.validate();
    Evaluator evaluator(g, freq, g.penalized_edges());
    if (mode == SelectionMode::Lexicographic && evaluator.objective_count() < 2)
        throw std::invalid_argument("lexicographic mode needs a tie-break objective");

    RngStream root(config.seed);
    RngStream init_rng = root.child(1);
    RngStream parent_rng = root.child(2);
    RngStream op_rng = root.child(3);
    RngStream crossover_rng = root.child(4);
    RngStream mutate_rng = root.child(5);

    EvolutionResult result;

    auto evaluate_all = [&](std::vector<Individual>& pop) {
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const auto& f = pop[i].fitness;
            if (!f || !f->names || *f->names != *evaluator.objective_names())
                todo.push_back(i);
        }
        parallel_for(todo.size(), config.threads,
                     [&](std::size_t k) { pop[todo[k]].fitness = evaluator.evaluate(pop[todo[k]]); });
        result.evaluations += todo.size();
    };
    auto offer_generated = [&](const std::vector<Individual>& pop) {
        for (const auto& ind : pop) {
            result.archive.offer(*ind.fitness, ind);
            if (hooks.on_individual) hooks.on_individual(ind, *ind.fitness);
        }
    };
    auto offer_front = [&](const std::vector<Individual>& pop) {
        for (const auto& ind : pop) result.front.offer(*ind.fitness, ind);
    };

    std::vector<Individual> population;
    if (hooks.initial_population) {
        population = *hooks.initial_population;
        for (auto& ind : population)
            if (static_cast<int>(ind.tensors.size()) != g.node_count())
                throw std::invalid_argument("seed individual does not match graph");
        evaluate_all(population);
        if (static_cast<int>(population.size()) > config.mu)
            population = mode == SelectionMode::Lexicographic
                             ? lexicographic_select(std::move(population), config.mu)
                             : nsga2_select(std::move(population), config.mu);
        while (static_cast<int>(population.size()) < config.mu)
            population.push_back(create_individual(g, init_rng));
    } else {
        population.reserve(config.mu);
        for (int i = 0; i < config.mu; ++i) population.push_back(create_individual(g, init_rng));
    }
    evaluate_all(population);
    offer_generated(population);
    offer_front(population);

    for (int gen = 1; gen <= config.generations; ++gen) {
        if (hooks.stop && hooks.stop->load()) break;

        std::vector<Individual> offspring;
        offspring.reserve(config.lambda);
        while (static_cast<int>(offspring.size()) < config.lambda) {
            Individual i1 = population[parent_rng.uniform_int(static_cast<int>(population.size()))];
            Individual i2 = population[parent_rng.uniform_int(static_cast<int>(population.size()))];
            const double u = op_rng.uniform();
            bool crossed = false;
            if (u < config.p_crossover) {
                crossover(i1, i2, config.per_node_swap_prob, crossover_rng);
                crossed = true;
            } else if (u < config.p_crossover + config.p_mutation) {
                mutate(g, i1, config.mutation_sigma, mutate_rng);
            }
            offspring.push_back(std::move(i1));
            if (crossed && config.keep_both_offspring &&
                static_cast<int>(offspring.size()) < config.lambda)
                offspring.push_back(std::move(i2));
        }
        evaluate_all(offspring);
        offer_generated(offspring);

        std::vector<Individual> pool = std::move(population);
        pool.insert(pool.end(), std::make_move_iterator(offspring.begin()),
                    std::make_move_iterator(offspring.end()));
        population = mode == SelectionMode::Lexicographic
                         ? lexicographic_select(std::move(pool), config.mu)
                         : nsga2_select(std::move(pool), config.mu);
        offer_front(population);

        result.generations_run = gen;
        if (config.checkpoint_every > 0 && hooks.on_checkpoint &&
            gen % config.checkpoint_every == 0)
            hooks.on_checkpoint(gen, result.front, result.archive);
    }

    result.population = std::move(population);
    return result;
}

}  // namespace causalfront
