#include "causalfront/island.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace causalfront {

namespace {

int scaled(int value, double scale, int floor_at) {
    return std::max(floor_at, static_cast<int>(std::lround(value * scale)));
}

// Full graph minus the penalized edges not listed in `kept`.
CausalGraph reduced_graph(const CausalGraph& full, std::span<const Edge> kept) {
    auto nodes = full.nodes();
    std::vector<Edge> removed;
    for (const auto& e : full.penalized_edges())
        if (std::find(kept.begin(), kept.end(), e) == kept.end()) removed.push_back(e);
    for (const auto& e : removed)
        for (auto& n : nodes)
            if (n.name == e.to)
                n.parents.erase(std::remove(n.parents.begin(), n.parents.end(), e.from),
                                n.parents.end());
    return CausalGraph(std::move(nodes), std::vector<Edge>(kept.begin(), kept.end()));
}

}  // namespace

IslandPlan default_island_plan(const CausalGraph& full_graph, double scale, int repetitions) {
    const auto& edges = full_graph.penalized_edges();
    IslandPlan plan;
    if (edges.empty()) {
        IslandSpec only;
        only.id = "full";
        only.population = scaled(300, scale, 8);
        only.runs = 1;
        only.generations = scaled(400, scale, 5);
        plan.stages.push_back({{only}, 0});
        return plan;
    }

    const int pop1 = scaled(300, scale, 8);
    const int gens1 = scaled(400, scale, 5);
    const int best = scaled(400, scale, 8);
    const std::size_t archive_target = static_cast<std::size_t>(scaled(2000, scale, 24));
    const int pop3 = scaled(2000, scale, 8);
    const int gens3 = scaled(800, scale, 5);

    for (int rep = 1; rep <= repetitions; ++rep) {
        const std::string prefix = "r" + std::to_string(rep) + ".";
        const std::size_t skip = rep == 1 ? 0 : archive_target;

        IslandStage extremes;
        extremes.skip_if_archive_at_least = skip;
        IslandSpec min_tvd;
        min_tvd.id = prefix + "s1.tvd";
        min_tvd.population = pop1;
        min_tvd.runs = 4;
        min_tvd.generations = gens1;
        extremes.islands.push_back(min_tvd);
        for (const auto& e : edges) {
            IslandSpec lex;
            lex.id = prefix + "s1.lex." + edge_label(e);
            lex.kept_edges = {e};
            lex.mode = SelectionMode::Lexicographic;
            lex.lex_edge = e;
            lex.population = pop1;
            lex.runs = 4;
            lex.generations = gens1;
            extremes.islands.push_back(lex);
        }
        plan.stages.push_back(std::move(extremes));

        IslandStage pairs;
        pairs.skip_if_archive_at_least = skip;
        for (const auto& e : edges) {
            IslandSpec two_d;
            two_d.id = prefix + "s2." + edge_label(e);
            two_d.kept_edges = {e};
            two_d.seed_from = {prefix + "s1.tvd", prefix + "s1.lex." + edge_label(e)};
            two_d.take_best = best;
            two_d.population = best;
            two_d.runs = 1;
            two_d.generations = gens1;
            pairs.islands.push_back(two_d);
        }
        plan.stages.push_back(std::move(pairs));
    }

    IslandStage final_stage;
    IslandSpec full;
    full.id = "s3.full";
    full.kept_edges = edges;
    full.seed_from_archive = true;
    full.population = pop3;
    full.runs = 1;
    full.generations = gens3;
    final_stage.islands.push_back(full);
    plan.stages.push_back(std::move(final_stage));
    return plan;
}

std::vector<Individual> lexicographic_evolve(const CausalGraph& g, const FrequencyTable& freq,
                                             const Edge& edge, const EvolutionConfig& config) {
    if (g.penalized_edges().size() != 1 || g.penalized_edges()[0] != edge)
        throw std::invalid_argument("lexicographic_evolve expects the graph penalizing exactly this edge");
    return run_evolution(g, freq, config, SelectionMode::Lexicographic).population;
}

Individual transplant(const Individual& ind, const CausalGraph& from, const CausalGraph& to) {
    if (from.node_count() != to.node_count())
        throw std::invalid_argument("transplant: node sets differ");
    Individual out;
    out.tensors.reserve(to.node_count());
    for (int i = 0; i < to.node_count(); ++i) {
        const auto& to_node = to.node(i);
        const int j = from.index_of(to_node.name);
        const auto& from_node = from.node(j);
        if (from_node.cardinality != to_node.cardinality)
            throw std::invalid_argument("transplant: cardinality mismatch at " + to_node.name);

        // Position of each to-parent within the from-parent list; -1 = new.
        std::vector<int> from_axis{0};
        for (const auto& p : to_node.parents) {
            auto it = std::find(from_node.parents.begin(), from_node.parents.end(), p);
            if (it == from_node.parents.end()) {
                const bool is_penalized_edge =
                    std::find(to.penalized_edges().begin(), to.penalized_edges().end(),
                              Edge{p, to_node.name}) != to.penalized_edges().end();
                if (!is_penalized_edge)
                    throw std::invalid_argument(
                        "transplant: target graph adds non-penalized parent " + p + " of " +
                        to_node.name);
                from_axis.push_back(-1);
            } else {
                from_axis.push_back(static_cast<int>(it - from_node.parents.begin()) + 1);
            }
        }
        for (const auto& p : from_node.parents)
            if (std::find(to_node.parents.begin(), to_node.parents.end(), p) ==
                to_node.parents.end())
                throw std::invalid_argument("transplant: target graph drops parent " + p +
                                            " of " + to_node.name);

        const Tensor& src = ind.tensors[j];
        Tensor dst(to.tensor_shape(i));
        const auto src_strides = strides_of(src.shape);
        std::vector<int> idx(dst.shape.size(), 0);
        std::size_t flat = 0;
        do {
            std::size_t s = 0;
            for (std::size_t k = 0; k < idx.size(); ++k)
                if (from_axis[k] >= 0)
                    s += src_strides[from_axis[k]] * static_cast<std::size_t>(idx[k]);
            dst.v[flat++] = src.v[s];
        } while (next_index(dst.shape, idx));
        out.tensors.push_back(std::move(dst));
    }
    return out;
}

std::vector<Individual> transplant(std::span<const Individual> pop, const CausalGraph& from,
                                   const CausalGraph& to) {
    std::vector<Individual> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) out.push_back(transplant(ind, from, to));
    return out;
}

IslandPlanResult run_island_plan(const CausalGraph& full_graph, const FrequencyTable& freq,
                                 const IslandPlan& plan, const EvolutionConfig& base_config,
                                 const IslandPlanHooks& hooks) {
    IslandPlanResult result;
    Evaluator full_eval(full_graph, freq, full_graph.penalized_edges());
    const auto& full_edges = full_graph.penalized_edges();

    struct IslandOutput {
        std::unique_ptr<CausalGraph> graph;
        std::vector<Individual> population;
    };
    std::map<std::string, IslandOutput> outputs;
    RngStream plan_rng(base_config.seed);

    auto global_offer = [&](const Individual& full_ind, const FitnessVector& f) {
        result.archive.offer(f, full_ind);
        if (hooks.shared_archive) hooks.shared_archive->offer(f, full_ind);
        if (hooks.on_individual) hooks.on_individual(full_ind, f);
    };
    auto archive_size = [&] {
        return hooks.shared_archive ? std::max(hooks.shared_archive->size(), result.archive.size())
                                    : result.archive.size();
    };

    std::uint64_t island_counter = 0;
    for (std::size_t stage_idx = 0; stage_idx < plan.stages.size(); ++stage_idx) {
        const auto& stage = plan.stages[stage_idx];
        if (hooks.stop && hooks.stop->load()) break;
        if (stage.skip_if_archive_at_least > 0 &&
            archive_size() >= stage.skip_if_archive_at_least)
            continue;

        for (const auto& island : stage.islands) {
            if (hooks.stop && hooks.stop->load()) break;
            auto graph = std::make_unique<CausalGraph>(reduced_graph(full_graph, island.kept_edges));
            Evaluator island_eval(*graph, freq, graph->penalized_edges());

            // When the conditioning sets of the kept edges coincide between the
            // variant and the full graph, the island fitness carries over and
            // removed edges contribute exactly zero after transplant; otherwise
            // transplanted individuals are re-evaluated on the full graph.
            bool structural_match = true;
            for (const auto& e : island.kept_edges)
                if (influence_conditioning_set(*graph, e) !=
                    influence_conditioning_set(full_graph, e))
                    structural_match = false;
            std::vector<int> full_slot;  // island objective k -> full objective index
            full_slot.push_back(0);
            for (const auto& e : island.kept_edges) {
                const auto it = std::find(full_edges.begin(), full_edges.end(), e);
                full_slot.push_back(1 + static_cast<int>(it - full_edges.begin()));
            }

            auto to_full = [&](const Individual& ind, const FitnessVector& f) {
                FrontMember out;
                out.individual = transplant(ind, *graph, full_graph);
                if (structural_match) {
                    out.fitness.names = full_eval.objective_names();
                    out.fitness.values.assign(full_edges.size() + 1, 0.0);
                    for (std::size_t k = 0; k < f.values.size(); ++k)
                        out.fitness.values[full_slot[k]] = f.values[k];
                } else {
                    out.fitness = full_eval.evaluate(out.individual);
                    ++result.evaluations;
                }
                return out;
            };
            // Every individual feeds the archive; the global front assembles
            // the per-run fronts, mirroring the per-generation front updates.
            auto on_individual = [&](const Individual& ind, const FitnessVector& f) {
                const FrontMember m = to_full(ind, f);
                global_offer(m.individual, m.fitness);
            };

            // Seed population: pooled prior islands (transplanted) or archive.
            std::vector<Individual> seeds;
            for (const auto& src : island.seed_from) {
                auto it = outputs.find(src);
                if (it == outputs.end())
                    throw std::invalid_argument("island " + island.id +
                                                " seeds from unknown island " + src);
                auto moved = transplant(it->second.population, *it->second.graph, *graph);
                seeds.insert(seeds.end(), std::make_move_iterator(moved.begin()),
                             std::make_move_iterator(moved.end()));
            }
            if (island.seed_from_archive) {
                const auto& source =
                    hooks.shared_archive && hooks.shared_archive->size() > result.archive.size()
                        ? *hooks.shared_archive
                        : result.archive;
                for (const auto& m : source.members())
                    seeds.push_back(transplant(m.individual, full_graph, *graph));
            }
            for (auto& s : seeds) s.fitness.reset();
            if (island.take_best > 0 && static_cast<int>(seeds.size()) > island.take_best) {
                for (auto& s : seeds) island_eval.annotate(s);
                result.evaluations += seeds.size();
                seeds = nsga2_select(std::move(seeds), island.take_best);
            }

            IslandLog log;
            log.id = island.id;
            log.runs = island.runs;
            log.best_objectives.assign(island_eval.objective_count(),
                                       std::numeric_limits<double>::infinity());
            std::vector<Individual> pooled;
            for (int run = 0; run < island.runs; ++run) {
                EvolutionConfig cfg = base_config;
                cfg.mu = cfg.lambda = island.population;
                cfg.generations = island.generations;
                // A degenerate one-island plan reproduces a plain run exactly.
                if (island_counter > 0 || run > 0)
                    cfg.seed = plan_rng.child(island_counter * 4096 + run + 1).key();
                RunHooks run_hooks;
                run_hooks.stop = hooks.stop;
                run_hooks.on_individual = on_individual;
                if (!seeds.empty()) run_hooks.initial_population = &seeds;
                auto r = run_evolution(*graph, freq, cfg, island.mode, run_hooks);
                log.evaluations += r.evaluations;
                if (r.front.empty()) log.converged = false;
                for (const auto* m : r.front.members()) {
                    const FrontMember full_m = to_full(m->individual, m->fitness);
                    result.front.offer(full_m.fitness, full_m.individual);
                }
                for (const auto& f : r.front.fitnesses())
                    for (std::size_t k = 0; k < f.values.size(); ++k)
                        log.best_objectives[k] = std::min(log.best_objectives[k], f.values[k]);
                pooled.insert(pooled.end(), std::make_move_iterator(r.population.begin()),
                              std::make_move_iterator(r.population.end()));
            }
            ++island_counter;
            result.evaluations += log.evaluations;
            result.logs.push_back(std::move(log));
            outputs[island.id] = IslandOutput{std::move(graph), std::move(pooled)};
        }
        if (hooks.on_stage_done) hooks.on_stage_done(stage_idx, result);
    }
    return result;
}

}  // namespace causalfront
