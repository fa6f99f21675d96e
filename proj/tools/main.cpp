#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalfront/bell_data.hpp"
#include "causalfront/bounds.hpp"
#include "causalfront/evolution.hpp"
#include "causalfront/io.hpp"
#include "causalfront/island.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace causalfront;

namespace {

std::atomic<bool> g_stop{false};
void handle_sigint(int) { g_stop.store(true); }

struct RunSetup {
    std::string graph_path;
    std::string frequency_path;
    double generate_gamma = -1.0;  // < 0: not set
    long long generate_shots = 0;  // 0: exact table
    std::string plan_path;
    std::string output_dir = "out";
    double scale = 1.0;
    EvolutionConfig evolution;
    bool seed_set = false;
    int repeat = 1;
};

void apply_config_file(const std::string& file, RunSetup& setup) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config " + file);
    json j;
    in >> j;
    if (j.contains("graph")) setup.graph_path = j.at("graph").get<std::string>();
    if (j.contains("frequency")) setup.frequency_path = j.at("frequency").get<std::string>();
    if (j.contains("generate")) {
        setup.generate_gamma = j.at("generate").at("gamma").get<double>();
        if (j.at("generate").contains("shots") && !j.at("generate").at("shots").is_null())
            setup.generate_shots = j.at("generate").at("shots").get<long long>();
    }
    if (j.contains("island_plan")) setup.plan_path = j.at("island_plan").get<std::string>();
    if (j.contains("output_dir")) setup.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("scale")) setup.scale = j.at("scale").get<double>();
    if (j.contains("evolution")) {
        const auto& e = j.at("evolution");
        auto& c = setup.evolution;
        c.mu = e.value("mu", c.mu);
        c.lambda = e.value("lambda", c.lambda);
        c.p_crossover = e.value("p_crossover", c.p_crossover);
        c.p_mutation = e.value("p_mutation", c.p_mutation);
        c.mutation_sigma = e.value("mutation_sigma", c.mutation_sigma);
        c.per_node_swap_prob = e.value("per_node_swap_prob", c.per_node_swap_prob);
        c.generations = e.value("generations", c.generations);
        if (e.contains("seed")) {
            c.seed = e.at("seed").get<std::uint64_t>();
            setup.seed_set = true;
        }
        c.threads = e.value("threads", c.threads);
        c.keep_both_offspring = e.value("keep_both_offspring", c.keep_both_offspring);
        c.checkpoint_every = e.value("checkpoint_every", c.checkpoint_every);
    }
}

json config_json(const EvolutionConfig& c) {
    return json{{"mu", c.mu},
                {"lambda", c.lambda},
                {"p_crossover", c.p_crossover},
                {"p_mutation", c.p_mutation},
                {"mutation_sigma", c.mutation_sigma},
                {"per_node_swap_prob", c.per_node_swap_prob},
                {"generations", c.generations},
                {"seed", c.seed},
                {"threads", c.threads},
                {"keep_both_offspring", c.keep_both_offspring},
                {"checkpoint_every", c.checkpoint_every}};
}

void write_manifest(const fs::path& file, const std::string& command, const RunSetup& setup,
                    const CausalGraph& graph, const FrequencyTable& freq, const json& extra) {
    json j;
    j["command"] = command;
    j["config"] = config_json(setup.evolution);
    j["seed"] = setup.evolution.seed;
    j["scale"] = setup.scale;
    j["graph_hash"] = io::hash_graph(graph);
    j["frequency_hash"] = io::hash_frequency_table(freq);
    for (auto& [k, v] : extra.items()) j[k] = v;
    std::ofstream out(file);
    out << j.dump(2) << "\n";
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void finalize_seed(RunSetup& setup) {
    if (!setup.seed_set) setup.evolution.seed = entropy_seed();
}

FrequencyTable resolve_frequency(const RunSetup& setup) {
    if (setup.generate_gamma >= 0.0) {
        RngStream rng(setup.evolution.seed ^ 0xD1CEull);
        return generate_frequencies(
            setup.generate_gamma, MeasurementSettings::chsh_optimal(),
            setup.generate_shots > 0 ? std::optional<long long>(setup.generate_shots)
                                     : std::nullopt,
            setup.generate_shots > 0 ? &rng : nullptr);
    }
    if (setup.frequency_path.empty())
        throw std::runtime_error("no frequency source: pass --freq FILE or --gamma G");
    return io::load_frequency_table(setup.frequency_path);
}

double min_front_tvd(const ParetoFront& front) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : front.fitnesses()) best = std::min(best, f.values[0]);
    return best;
}

void save_fitness_csv(const fs::path& file, const std::vector<FitnessVector>& fitnesses) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    for (const auto& f : fitnesses) {
        if (names.empty() && f.names) names = *f.names;
        rows.push_back(f.values);
    }
    std::sort(rows.begin(), rows.end());
    io::save_front_csv(file, names, std::move(rows));
}

int cmd_generate_data(double gamma, long long shots, std::uint64_t seed, bool seed_set,
                      fs::path out_csv) {
    const std::uint64_t used_seed = seed_set ? seed : entropy_seed();
    RngStream rng(used_seed);
    const auto settings = MeasurementSettings::chsh_optimal();
    const auto table = generate_frequencies(
        gamma, settings, shots > 0 ? std::optional<long long>(shots) : std::nullopt,
        shots > 0 ? &rng : nullptr);
    const double s_value = chsh(table);

    io::save_frequency_csv(out_csv, table);
    json meta;
    meta["gamma"] = gamma;
    meta["settings"] = {{"alice", settings.alice}, {"bob", settings.bob}};
    meta["shots"] = shots > 0 ? json(shots) : json(nullptr);
    meta["seed"] = used_seed;
    meta["S"] = s_value;
    meta["index_order"] = table.observable_vars;
    fs::path meta_path = out_csv;
    meta_path.replace_extension(".meta.json");
    std::ofstream out(meta_path);
    out << meta.dump(2) << "\n";

    std::cout << "S: " << io::format_double(s_value) << "\n"
              << "wrote " << out_csv.string() << " and " << meta_path.string() << "\n";
    return 0;
}

int cmd_evolve(RunSetup setup) {
    finalize_seed(setup);
    const CausalGraph graph = io::load_graph(setup.graph_path);
    const FrequencyTable freq = resolve_frequency(setup);
    if (setup.scale != 1.0) {
        auto& c = setup.evolution;
        c.mu = std::max(4, static_cast<int>(std::lround(c.mu * setup.scale)));
        c.lambda = std::max(4, static_cast<int>(std::lround(c.lambda * setup.scale)));
        c.generations = std::max(1, static_cast<int>(std::lround(c.generations * setup.scale)));
    }

    const fs::path out_dir = setup.output_dir;
    fs::create_directories(out_dir);
    RunHooks hooks;
    hooks.stop = &g_stop;
    hooks.on_checkpoint = [&](int gen, const ParetoFront& front, const EpsilonArchive& archive) {
        char tag[32];
        std::snprintf(tag, sizeof tag, "checkpoint_gen%06d", gen);
        save_fitness_csv(out_dir / (std::string(tag) + "_front.csv"), front.fitnesses());
        save_fitness_csv(out_dir / (std::string(tag) + "_archive.csv"), archive.fitnesses());
    };

    auto result = run_evolution(graph, freq, setup.evolution, SelectionMode::Nsga2, hooks);

    std::vector<FrontMember> front_members;
    for (const auto* m : result.front.members()) front_members.push_back(*m);
    io::save_members(out_dir / "front", graph, std::move(front_members));
    io::save_members(out_dir / "archive", graph, result.archive.members());
    io::save_frequency_csv(out_dir / "frequencies.csv", freq);
    write_manifest(out_dir / "manifest.json", "evolve", setup, graph, freq,
                   json{{"evaluations", result.evaluations},
                        {"generations_run", result.generations_run},
                        {"front_size", result.front.size()},
                        {"archive_size", result.archive.size()},
                        {"interrupted", g_stop.load()}});

    std::cout << "front size: " << result.front.size()
              << "\narchive size: " << result.archive.size()
              << "\nevaluations: " << result.evaluations
              << "\nmin TVD: " << io::format_double(min_front_tvd(result.front)) << "\n";
    return 0;
}

int cmd_island(RunSetup setup) {
    finalize_seed(setup);
    const CausalGraph graph = io::load_graph(setup.graph_path);
    const FrequencyTable freq = resolve_frequency(setup);
    const IslandPlan plan = setup.plan_path.empty()
                                ? default_island_plan(graph, setup.scale)
                                : io::load_plan_json(setup.plan_path);

    const fs::path out_dir = setup.output_dir;
    fs::create_directories(out_dir);
    io::save_plan_json(out_dir / "plan.json", plan);

    EpsilonArchive merged;
    ParetoFront merged_front;
    json logs = json::array();
    std::size_t total_evaluations = 0;
    RngStream seed_stream(setup.evolution.seed);

    for (int rep = 0; rep < setup.repeat && !g_stop.load(); ++rep) {
        EvolutionConfig cfg = setup.evolution;
        if (rep > 0) cfg.seed = seed_stream.child(rep).key();
        IslandPlanHooks hooks;
        hooks.stop = &g_stop;
        hooks.shared_archive = &merged;
        hooks.on_stage_done = [&](std::size_t stage, const IslandPlanResult&) {
            char tag[48];
            std::snprintf(tag, sizeof tag, "rep%02d_stage%02d_archive.csv", rep,
                          static_cast<int>(stage));
            save_fitness_csv(out_dir / tag, merged.fitnesses());
        };
        auto result = run_island_plan(graph, freq, plan, cfg, hooks);
        total_evaluations += result.evaluations;
        for (const auto* m : result.front.members())
            merged_front.offer(m->fitness, m->individual);
        for (const auto& log : result.logs)
            logs.push_back(json{{"repetition", rep},
                                {"island", log.id},
                                {"runs", log.runs},
                                {"evaluations", log.evaluations},
                                {"converged", log.converged},
                                {"best_objectives", log.best_objectives}});
    }

    std::vector<FrontMember> front_members;
    for (const auto* m : merged_front.members()) front_members.push_back(*m);
    io::save_members(out_dir / "front", graph, std::move(front_members));
    io::save_members(out_dir / "archive", graph, merged.members());
    io::save_frequency_csv(out_dir / "frequencies.csv", freq);
    {
        std::ofstream out(out_dir / "islands_log.json");
        out << logs.dump(2) << "\n";
    }
    write_manifest(out_dir / "manifest.json", "island", setup, graph, freq,
                   json{{"evaluations", total_evaluations},
                        {"repetitions", setup.repeat},
                        {"front_size", merged_front.size()},
                        {"archive_size", merged.size()},
                        {"interrupted", g_stop.load()}});

    std::cout << "front size: " << merged_front.size()
              << "\narchive size: " << merged.size()
              << "\nevaluations: " << total_evaluations
              << "\nmin TVD: " << io::format_double(min_front_tvd(merged_front)) << "\n";
    return 0;
}

int cmd_bound_check(const std::string& front_path, const std::string& freq_path,
                    const std::string& graph_path, const std::string& edge_label_str,
                    const std::string& genomes_path, const std::string& report_path) {
    const CausalGraph graph = io::load_graph(graph_path);
    const FrequencyTable freq = io::load_frequency_table(freq_path);
    const Edge edge = parse_edge(edge_label_str);

    // Conditioning set of the bound, derived on the edge-bearing graph and
    // restricted to observables.
    const int to_idx = graph.index_of(edge.to);
    const int from_idx = graph.index_of(edge.from);
    std::vector<std::string> conditioning;
    {
        auto nodes = graph.nodes();
        std::vector<Edge> penalized{edge};
        if (!graph.has_edge(from_idx, to_idx))
            for (auto& n : nodes)
                if (n.name == edge.to) n.parents.insert(n.parents.begin(), edge.from);
        CausalGraph edge_graph(std::move(nodes), std::move(penalized));
        for (const auto& name : influence_conditioning_set(edge_graph, edge))
            if (edge_graph.node(edge_graph.index_of(name)).observable)
                conditioning.push_back(name);
    }

    const auto front = io::load_front_csv(front_path);
    std::vector<std::pair<double, double>> points;
    const std::string c_name = "C[" + edge_label(edge) + "]";
    auto c_col = std::find(front.objective_names.begin(), front.objective_names.end(), c_name);
    if (c_col != front.objective_names.end()) {
        const std::size_t k = c_col - front.objective_names.begin();
        for (const auto& row : front.rows) points.emplace_back(row[0], row[k]);
    } else if (!genomes_path.empty()) {
        // No influence column: recompute each genome's influence in the same
        // variable roles from its observable joint.
        const auto genomes = io::load_genomes_json(genomes_path, graph);
        if (genomes.size() != front.rows.size())
            throw std::runtime_error("front and genome sidecar sizes differ");
        for (std::size_t i = 0; i < genomes.size(); ++i) {
            const auto joint = to_frequency_table(observable_joint(graph, genomes[i]));
            const double c = causal_influence_empirical(joint, edge, conditioning).value;
            points.emplace_back(front.rows[i][0], c);
        }
    } else if (!front.rows.empty()) {
        throw std::runtime_error("front has no column " + c_name +
                                 "; pass --genomes to recompute influences");
    }

    const auto report = audit_points(points, freq, edge, conditioning);
    io::save_audit_json(report_path, report);
    std::size_t applicable = 0;
    for (const auto& p : report.points) applicable += p.applicable ? 1 : 0;
    std::cout << "points: " << report.points.size() << "\napplicable: " << applicable
              << "\nviolations: " << report.violations << "\nwrote " << report_path << "\n";
    return 0;
}

int cmd_export_front(const std::string& genomes_path, const std::string& graph_path,
                     const std::string& freq_path, const std::string& out_stem, bool keep_all) {
    const CausalGraph graph = io::load_graph(graph_path);
    const FrequencyTable freq = io::load_frequency_table(freq_path);
    const auto genomes = io::load_genomes_json(genomes_path, graph);
    Evaluator evaluator(graph, freq, graph.penalized_edges());

    ParetoFront front;
    std::vector<FrontMember> all;
    for (const auto& ind : genomes) {
        const auto f = evaluator.evaluate(ind);
        if (keep_all)
            all.push_back(FrontMember{f, ind});
        else
            front.offer(f, ind);
    }
    if (!keep_all)
        for (const auto* m : front.members()) all.push_back(*m);
    const std::size_t exported = all.size();
    io::save_members(out_stem, graph, std::move(all));
    std::cout << "exported " << exported << " members to " << out_stem << ".csv\n";
    return 0;
}

void add_run_options(CLI::App* cmd, RunSetup& setup, std::string& config_path) {
    cmd->add_option("--config", config_path, "Run configuration file (JSON)");
    cmd->add_option("--graph", setup.graph_path, "Graph specification (JSON)");
    cmd->add_option("--freq", setup.frequency_path, "Frequency table (CSV or JSON)");
    cmd->add_option("--gamma", setup.generate_gamma,
                    "Generate exact synthetic data at this gamma");
    cmd->add_option("--out", setup.output_dir, "Output directory");
    cmd->add_option("--seed", setup.evolution.seed, "Master seed")
        ->envname("CAUSALFRONT_SEED");
    cmd->add_option("--mu", setup.evolution.mu, "Parent population size");
    cmd->add_option("--lambda", setup.evolution.lambda, "Offspring per generation");
    cmd->add_option("--generations", setup.evolution.generations, "Generation count");
    cmd->add_option("--sigma", setup.evolution.mutation_sigma, "Mutation std deviation");
    cmd->add_option("--p-crossover", setup.evolution.p_crossover, "Crossover probability");
    cmd->add_option("--p-mutation", setup.evolution.p_mutation, "Mutation probability");
    cmd->add_option("--threads", setup.evolution.threads,
                    "Evaluation threads (1 = deterministic mode, 0 = all cores)")
        ->envname("CAUSALFRONT_THREADS");
    cmd->add_option("--checkpoint-every", setup.evolution.checkpoint_every,
                    "Write checkpoint files every K generations");
    cmd->add_option("--scale", setup.scale, "Desk-scale factor in (0,1]")
        ->envname("CAUSALFRONT_SCALE");
}

// Re-parse flags over the config file baseline: config supplies defaults,
// explicitly passed flags win.
void merge_config(CLI::App* cmd, const std::string& config_path, RunSetup& setup,
                  const RunSetup& cli_values) {
    if (config_path.empty()) {
        setup.seed_set = setup.seed_set || cmd->count("--seed") > 0;
        return;
    }
    apply_config_file(config_path, setup);
    auto pick = [&](const char* flag, auto RunSetup::* field) {
        if (cmd->count(flag) > 0) setup.*field = cli_values.*field;
    };
    auto pick_evo = [&](const char* flag, auto EvolutionConfig::* field) {
        if (cmd->count(flag) > 0) setup.evolution.*field = cli_values.evolution.*field;
    };
    pick("--graph", &RunSetup::graph_path);
    pick("--freq", &RunSetup::frequency_path);
    pick("--gamma", &RunSetup::generate_gamma);
    pick("--out", &RunSetup::output_dir);
    pick("--scale", &RunSetup::scale);
    pick_evo("--seed", &EvolutionConfig::seed);
    pick_evo("--mu", &EvolutionConfig::mu);
    pick_evo("--lambda", &EvolutionConfig::lambda);
    pick_evo("--generations", &EvolutionConfig::generations);
    pick_evo("--sigma", &EvolutionConfig::mutation_sigma);
    pick_evo("--p-crossover", &EvolutionConfig::p_crossover);
    pick_evo("--p-mutation", &EvolutionConfig::p_mutation);
    pick_evo("--threads", &EvolutionConfig::threads);
    pick_evo("--checkpoint-every", &EvolutionConfig::checkpoint_every);
    setup.seed_set = setup.seed_set || cmd->count("--seed") > 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal-model Pareto front exploration for Bell-type experiments"};
    app.require_subcommand(1);
    std::signal(SIGINT, handle_sigint);

    double gamma = 0.0;
    long long shots = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "frequencies.csv";
    auto* gen = app.add_subcommand("generate-data", "Write a synthetic Bell frequency table");
    gen->add_option("--gamma", gamma, "State coherence in [0,1]")->required();
    gen->add_option("--shots", shots, "Sample a finite number of events (default: exact)");
    gen->add_option("--seed", gen_seed, "Sampling seed")->envname("CAUSALFRONT_SEED");
    gen->add_option("--out", gen_out, "Output CSV path");

    RunSetup evolve_setup;
    std::string evolve_config;
    auto* evolve = app.add_subcommand("evolve", "Run the (mu+lambda) NSGA-II evolution");
    add_run_options(evolve, evolve_setup, evolve_config);

    RunSetup island_setup;
    std::string island_config;
    auto* island = app.add_subcommand("island", "Run a staged island-model plan");
    add_run_options(island, island_setup, island_config);
    island->add_option("--plan", island_setup.plan_path, "Island plan (JSON); default: built-in");
    island->add_option("--repeat", island_setup.repeat, "Merge this many plan repetitions");

    std::string bc_front, bc_freq, bc_graph, bc_genomes, bc_report = "bound_report.json";
    std::string bc_edge = "a->b";
    auto* bound = app.add_subcommand("bound-check", "Audit a front against the trade-off bound");
    bound->add_option("--front", bc_front, "Front CSV")->required();
    bound->add_option("--freq", bc_freq, "Frequency table")->required();
    bound->add_option("--graph", bc_graph, "Graph specification")->required();
    bound->add_option("--edge", bc_edge, "Edge to audit, e.g. a->b");
    bound->add_option("--genomes", bc_genomes, "Genome sidecar, for fronts without a C column");
    bound->add_option("--out", bc_report, "Report path (JSON)");

    std::string ef_genomes, ef_graph, ef_freq, ef_out = "exported";
    bool ef_all = false;
    auto* expf = app.add_subcommand("export-front", "Re-evaluate genomes and export a front");
    expf->add_option("--genomes", ef_genomes, "Genome sidecar (JSON)")->required();
    expf->add_option("--graph", ef_graph, "Graph specification")->required();
    expf->add_option("--freq", ef_freq, "Frequency table")->required();
    expf->add_option("--out", ef_out, "Output stem (writes <stem>.csv, <stem>_genomes.json)");
    expf->add_flag("--all", ef_all, "Export every genome, not only the non-dominated subset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) return cmd_generate_data(gamma, shots, gen_seed, gen->count("--seed") > 0, gen_out);
        if (*evolve) {
            const RunSetup cli_values = evolve_setup;
            merge_config(evolve, evolve_config, evolve_setup, cli_values);
            return cmd_evolve(std::move(evolve_setup));
        }
        if (*island) {
            const RunSetup cli_values = island_setup;
            merge_config(island, island_config, island_setup, cli_values);
            return cmd_island(std::move(island_setup));
        }
        if (*bound)
            return cmd_bound_check(bc_front, bc_freq, bc_graph, bc_edge, bc_genomes, bc_report);
        if (*expf) return cmd_export_front(ef_genomes, ef_graph, ef_freq, ef_out, ef_all);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
