#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "causalfront/bounds.hpp"
#include "causalfront/causal_graph.hpp"
#include "causalfront/island.hpp"
#include "causalfront/metrics.hpp"
#include "causalfront/pareto_front.hpp"

namespace causalfront::io {

// Doubles are printed with enough digits to round-trip exactly.
std::string format_double(double x);

// --- graph specification ----------------------------------------------------
CausalGraph load_graph(const std::filesystem::path& file);
void save_graph(const std::filesystem::path& file, const CausalGraph& g);

// --- frequency tables ---------------------------------------------------
// CSV: one column per observable variable plus `frequency`; rows in any
// order, missing cells are zero. JSON: flattened values with declared
// index_order. Unnormalized inputs are normalized on load.
FrequencyTable load_frequency_table(const std::filesystem::path& file);
void save_frequency_csv(const std::filesystem::path& file, const FrequencyTable& table);
void save_frequency_json(const std::filesystem::path& file, const FrequencyTable& table);

// --- fronts and genomes -------------------------------------------------
struct FrontData {
    std::vector<std::string> objective_names;
    std::vector<std::vector<double>> rows;
};

// One row per member, objective columns, rows sorted lexicographically.
void save_front_csv(const std::filesystem::path& file,
                    const std::vector<std::string>& objective_names,
                    std::vector<std::vector<double>> rows);
FrontData load_front_csv(const std::filesystem::path& file);

// Genome sidecar: per-node index_order plus one flattened tensor set per
// member, aligned with the rows of the corresponding front CSV.
void save_genomes_json(const std::filesystem::path& file, const CausalGraph& g,
                       std::span<const FrontMember> members);
std::vector<Individual> load_genomes_json(const std::filesystem::path& file,
                                          const CausalGraph& g);

// Sorts members canonically (by fitness, lexicographic) and writes
// <stem>.csv + <stem>_genomes.json.
void save_members(const std::filesystem::path& stem, const CausalGraph& g,
                  std::vector<FrontMember> members);

// --- island plans ---------------------------------------------------------
IslandPlan load_plan_json(const std::filesystem::path& file);
void save_plan_json(const std::filesystem::path& file, const IslandPlan& plan);

// --- audit reports ----------------------------------------------------------
void save_audit_json(const std::filesystem::path& file, const AuditReport& report);

// --- hashing ----------------------------------------------------------------
std::uint64_t fnv1a(std::span<const unsigned char> bytes);
std::string hash_hex(std::uint64_t h);
std::string hash_graph(const CausalGraph& g);
std::string hash_frequency_table(const FrequencyTable& t);

}  // namespace causalfront::io
