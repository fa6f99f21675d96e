#include "causalfront/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace causalfront::io {

using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << content;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CausalGraph load_graph(const std::filesystem::path& file) {
    const json j = json::parse(slurp(file));
    std::vector<NodeSpec> nodes;
    for (const auto& n : j.at("nodes")) {
        NodeSpec spec;
        spec.name = n.at("name").get<std::string>();
        spec.cardinality = n.at("cardinality").get<int>();
        spec.observable = n.at("observable").get<bool>();
        for (const auto& p : n.at("parents")) spec.parents.push_back(p.get<std::string>());
        nodes.push_back(std::move(spec));
    }
    std::vector<Edge> penalized;
    if (j.contains("penalized_edges"))
        for (const auto& e : j.at("penalized_edges"))
            penalized.push_back(Edge{e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    return CausalGraph(std::move(nodes), std::move(penalized));
}

void save_graph(const std::filesystem::path& file, const CausalGraph& g) {
    json j;
    j["nodes"] = json::array();
    for (const auto& n : g.nodes())
        j["nodes"].push_back({{"name", n.name},
                              {"cardinality", n.cardinality},
                              {"observable", n.observable},
                              {"parents", n.parents}});
    j["penalized_edges"] = json::array();
    for (const auto& e : g.penalized_edges())
        j["penalized_edges"].push_back(json::array({e.from, e.to}));
    spit(file, j.dump(2) + "\n");
}

FrequencyTable load_frequency_table(const std::filesystem::path& file) {
    FrequencyTable table;
    if (file.extension() == ".json") {
        const json j = json::parse(slurp(file));
        for (const auto& v : j.at("index_order"))
            table.observable_vars.push_back(v.get<std::string>());
        Shape shape;
        for (const auto& c : j.at("cardinalities")) shape.push_back(c.get<int>());
        table.values = Tensor(shape);
        const auto& vals = j.at("values");
        if (vals.size() != table.values.size())
            throw std::runtime_error("frequency values do not match declared shape");
        for (std::size_t i = 0; i < table.values.size(); ++i)
            table.values.v[i] = vals.at(i).get<double>();
        table.normalized = j.value("normalized", false);
    } else {
        std::istringstream in(slurp(file));
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + file.string());
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto header = split_csv_line(line);
        if (header.size() < 2 || header.back() != "frequency")
            throw std::runtime_error("frequency csv must end with a `frequency` column");
        table.observable_vars.assign(header.begin(), header.end() - 1);

        std::vector<std::vector<int>> cells;
        std::vector<double> freqs;
        Shape shape(table.observable_vars.size(), 1);
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != header.size())
                throw std::runtime_error("ragged csv row: " + line);
            std::vector<int> idx;
            for (std::size_t k = 0; k + 1 < fields.size(); ++k) {
                const int v = std::stoi(fields[k]);
                if (v < 0) throw std::runtime_error("negative value label: " + line);
                shape[k] = std::max(shape[k], v + 1);
                idx.push_back(v);
            }
            cells.push_back(std::move(idx));
            freqs.push_back(std::stod(fields.back()));
        }
        table.values = Tensor(shape, 0.0);
        for (std::size_t r = 0; r < cells.size(); ++r)
            table.values.at(cells[r]) += freqs[r];
        table.normalized = false;
    }
    if (!table.normalized) normalize(table);
    return table;
}

void save_frequency_csv(const std::filesystem::path& file, const FrequencyTable& table) {
    std::string out;
    for (const auto& v : table.observable_vars) out += v + ",";
    out += "frequency\n";
    std::vector<int> idx(table.values.shape.size(), 0);
    std::size_t flat = 0;
    do {
        for (int i : idx) out += std::to_string(i) + ",";
        out += format_double(table.values.v[flat++]) + "\n";
    } while (next_index(table.values.shape, idx));
    spit(file, out);
}

void save_frequency_json(const std::filesystem::path& file, const FrequencyTable& table) {
    json j;
    j["index_order"] = table.observable_vars;
    j["cardinalities"] = table.values.shape;
    j["values"] = table.values.v;
    j["normalized"] = table.normalized;
    spit(file, j.dump(2) + "\n");
}

void save_front_csv(const std::filesystem::path& file,
                    const std::vector<std::string>& objective_names,
                    std::vector<std::vector<double>> rows) {
    std::string out;
    for (std::size_t k = 0; k < objective_names.size(); ++k)
        out += objective_names[k] + (k + 1 < objective_names.size() ? "," : "\n");
    if (objective_names.empty()) out += "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            out += format_double(row[k]) + (k + 1 < row.size() ? "," : "");
        out += "\n";
    }
    spit(file, out);
}

FrontData load_front_csv(const std::filesystem::path& file) {
    FrontData data;
    std::istringstream in(slurp(file));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty front csv");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    data.objective_names = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& f : split_csv_line(line)) row.push_back(std::stod(f));
        if (row.size() != data.objective_names.size())
            throw std::runtime_error("ragged front csv row: " + line);
        data.rows.push_back(std::move(row));
    }
    return data;
}

void save_genomes_json(const std::filesystem::path& file, const CausalGraph& g,
                       std::span<const FrontMember> members) {
    json j;
    j["graph_hash"] = hash_graph(g);
    j["nodes"] = json::array();
    for (int i = 0; i < g.node_count(); ++i) {
        std::vector<std::string> order{g.node(i).name};
        order.insert(order.end(), g.node(i).parents.begin(), g.node(i).parents.end());
        j["nodes"].push_back({{"name", g.node(i).name},
                              {"index_order", order},
                              {"shape", g.tensor_shape(i)}});
    }
    j["members"] = json::array();
    for (const auto& m : members) {
        json entry;
        entry["fitness"] = m.fitness.values;
        entry["tensors"] = json::array();
        for (const auto& t : m.individual.tensors) entry["tensors"].push_back(t.v);
        j["members"].push_back(std::move(entry));
    }
    spit(file, j.dump() + "\n");
}

std::vector<Individual> load_genomes_json(const std::filesystem::path& file,
                                          const CausalGraph& g) {
    const json j = json::parse(slurp(file));
    if (j.at("graph_hash").get<std::string>() != hash_graph(g))
        throw std::runtime_error("genome sidecar was produced for a different graph");
    std::vector<Individual> out;
    for (const auto& entry : j.at("members")) {
        Individual ind;
        const auto& tensors = entry.at("tensors");
        for (int i = 0; i < g.node_count(); ++i) {
            Tensor t(g.tensor_shape(i));
            const auto& vals = tensors.at(i);
            if (vals.size() != t.size())
                throw std::runtime_error("genome tensor shape mismatch");
            for (std::size_t k = 0; k < t.size(); ++k) t.v[k] = vals.at(k).get<double>();
            if (!is_valid_cpt(t)) throw std::runtime_error("genome tensor is not a valid CPT");
            ind.tensors.push_back(std::move(t));
        }
        out.push_back(std::move(ind));
    }
    return out;
}

void save_members(const std::filesystem::path& stem, const CausalGraph& g,
                  std::vector<FrontMember> members) {
    std::sort(members.begin(), members.end(), [](const FrontMember& a, const FrontMember& b) {
        return a.fitness.values < b.fitness.values;
    });
    std::vector<std::string> names;
    if (!members.empty() && members[0].fitness.names) names = *members[0].fitness.names;
    std::vector<std::vector<double>> rows;
    for (const auto& m : members) rows.push_back(m.fitness.values);
    auto csv = stem;
    csv += ".csv";
    save_front_csv(csv, names, std::move(rows));
    auto genomes = stem;
    genomes += "_genomes.json";
    save_genomes_json(genomes, g, members);
}

namespace {
const char* mode_name(SelectionMode m) {
    return m == SelectionMode::Lexicographic ? "lexicographic" : "multi";
}
SelectionMode mode_from(const std::string& s) {
    if (s == "lexicographic") return SelectionMode::Lexicographic;
    if (s == "multi") return SelectionMode::Nsga2;
    throw std::runtime_error("unknown island mode: " + s);
}
}  // namespace

IslandPlan load_plan_json(const std::filesystem::path& file) {
    const json j = json::parse(slurp(file));
    IslandPlan plan;
    for (const auto& s : j.at("stages")) {
        IslandStage stage;
        stage.skip_if_archive_at_least = s.value("skip_if_archive_at_least", 0);
        for (const auto& i : s.at("islands")) {
            IslandSpec island;
            island.id = i.at("id").get<std::string>();
            if (i.contains("kept_edges"))
                for (const auto& e : i.at("kept_edges"))
                    island.kept_edges.push_back(parse_edge(e.get<std::string>()));
            island.mode = mode_from(i.value("mode", "multi"));
            if (i.contains("lex_edge")) island.lex_edge = parse_edge(i.at("lex_edge").get<std::string>());
            if (i.contains("seed_from"))
                for (const auto& src : i.at("seed_from"))
                    island.seed_from.push_back(src.get<std::string>());
            island.seed_from_archive = i.value("seed_from_archive", false);
            island.take_best = i.value("take_best", 0);
            island.population = i.at("population").get<int>();
            island.runs = i.value("runs", 1);
            island.generations = i.at("generations").get<int>();
            stage.islands.push_back(std::move(island));
        }
        plan.stages.push_back(std::move(stage));
    }
    return plan;
}

void save_plan_json(const std::filesystem::path& file, const IslandPlan& plan) {
    json j;
    j["stages"] = json::array();
    for (const auto& s : plan.stages) {
        json stage;
        if (s.skip_if_archive_at_least > 0)
            stage["skip_if_archive_at_least"] = s.skip_if_archive_at_least;
        stage["islands"] = json::array();
        for (const auto& i : s.islands) {
            json island;
            island["id"] = i.id;
            std::vector<std::string> kept;
            for (const auto& e : i.kept_edges) kept.push_back(edge_label(e));
            island["kept_edges"] = kept;
            island["mode"] = mode_name(i.mode);
            if (i.mode == SelectionMode::Lexicographic)
                island["lex_edge"] = edge_label(i.lex_edge);
            if (!i.seed_from.empty()) island["seed_from"] = i.seed_from;
            if (i.seed_from_archive) island["seed_from_archive"] = true;
            if (i.take_best > 0) island["take_best"] = i.take_best;
            island["population"] = i.population;
            island["runs"] = i.runs;
            island["generations"] = i.generations;
            stage["islands"].push_back(std::move(island));
        }
        j["stages"].push_back(std::move(stage));
    }
    spit(file, j.dump(2) + "\n");
}

void save_audit_json(const std::filesystem::path& file, const AuditReport& report) {
    json j;
    j["edge"] = edge_label(report.edge);
    j["f_star"] = report.f_star;
    j["c_empirical"] = report.c_empirical;
    j["violations"] = report.violations;
    j["points"] = json::array();
    for (const auto& p : report.points) {
        json point{{"tau", p.tau},
                   {"c_model", p.c_model},
                   {"c_empirical", p.c_empirical},
                   {"applicable", p.applicable},
                   {"ok", p.ok}};
        if (p.applicable) point["bound"] = p.bound;
        j["points"].push_back(std::move(point));
    }
    spit(file, j.dump(2) + "\n");
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {
std::string hash_string(const std::string& s) {
    return hash_hex(fnv1a({reinterpret_cast<const unsigned char*>(s.data()), s.size()}));
}
}  // namespace

std::string hash_graph(const CausalGraph& g) {
    std::string repr;
    for (const auto& n : g.nodes()) {
        repr += n.name + ":" + std::to_string(n.cardinality) + ":" + (n.observable ? "o" : "h");
        for (const auto& p : n.parents) repr += "<" + p;
        repr += ";";
    }
    for (const auto& e : g.penalized_edges()) repr += edge_label(e) + ";";
    return hash_string(repr);
}

std::string hash_frequency_table(const FrequencyTable& t) {
    std::string repr;
    for (const auto& v : t.observable_vars) repr += v + ",";
    for (int d : t.values.shape) repr += std::to_string(d) + ",";
    for (double x : t.values.v) repr += format_double(x) + ",";
    return hash_string(repr);
}

}  // namespace causalfront::io
