#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "causalfront/fitness.hpp"
#include "causalfront/tensor.hpp"

namespace causalfront {

// One discrete random variable of the network. Values are labeled
// 0..cardinality-1; parents are listed in the order used by the node's
// conditional tensor.
struct NodeSpec {
    std::string name;
    int cardinality = 2;
    bool observable = true;
    std::vector<std::string> parents;
};

struct Edge {
    std::string from, to;
    bool operator==(const Edge&) const = default;
};

std::string edge_label(const Edge& e);        // "a->b"
Edge parse_edge(const std::string& label);    // inverse of edge_label

struct ValidationIssue {
    enum class Kind {
        DuplicateNodeName,
        BadCardinality,
        SelfParent,
        DuplicateParent,
        DanglingParent,
        Cycle,
        PenalizedEdgeMissing,
    };
    Kind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    bool has(ValidationIssue::Kind k) const;
};

ValidationReport validate_graph(std::span<const NodeSpec> nodes,
                                std::span<const Edge> penalized_edges);

// Fixed DAG of discrete nodes. Immutable after construction; structural
// queries are precomputed. Construction throws std::invalid_argument when
// validate_graph reports issues.
class CausalGraph {
public:
    CausalGraph(std::vector<NodeSpec> nodes, std::vector<Edge> penalized_edges);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const NodeSpec& node(int i) const { return nodes_[i]; }
    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const std::vector<Edge>& penalized_edges() const { return penalized_edges_; }

    int index_of(const std::string& name) const;          // throws if unknown
    std::optional<int> find(const std::string& name) const;
    const std::vector<int>& parents(int i) const { return parent_idx_[i]; }
    int cardinality(int i) const { return nodes_[i].cardinality; }
    bool has_edge(int from, int to) const;

    // Parents of j that are also parents of some parent of j.
    std::vector<int> grandparent_overlap(int j) const;

    const std::vector<int>& observable_nodes() const { return observable_; }
    std::vector<std::string> observable_names() const;

    // Shape of node i's conditional tensor: [cardinality, parent dims...].
    Shape tensor_shape(int i) const;

private:
    std::vector<NodeSpec> nodes_;
    std::vector<Edge> penalized_edges_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<int>> parent_idx_;
    std::vector<int> observable_;
};

// A model M: one conditional tensor per node, leading index the node's own
// value. Fitness is cached metadata, never part of the genome.
struct Individual {
    std::vector<Tensor> tensors;
    std::optional<FitnessVector> fitness;
};

constexpr double kCptNormTolerance = 1e-9;
constexpr double kFeasibilityThreshold = 1e-12;

// Column sums (over the leading index) equal 1 within kCptNormTolerance and
// all entries lie in [0,1].
bool is_valid_cpt(const Tensor& t, double tol = kCptNormTolerance);
bool is_valid_individual(const CausalGraph& g, const Individual& ind,
                         double tol = kCptNormTolerance);

// Joint or conditional distribution over named variables. values has shape
// [target dims..., condition dims...]. feasible holds one flag per condition
// assignment (a single entry when there are no conditions); cells of an
// infeasible condition column are set to 0 and must not be interpreted.
struct DistributionTensor {
    std::vector<std::string> target_vars;
    std::vector<std::string> condition_vars;
    Shape target_shape;
    Shape condition_shape;
    Tensor values;
    std::vector<std::uint8_t> feasible;

    bool is_feasible(std::size_t condition_cell) const {
        return feasible[condition_cell] != 0;
    }
};

// Alg. 2: pull in ancestor tensors until closed, contract holding target and
// condition indices, then divide by the marginal over the conditions.
DistributionTensor joint_distribution(const CausalGraph& g, const Individual& ind,
                                      std::span<const std::string> targets,
                                      std::span<const std::string> conditions = {});

// Joint over exactly the observable nodes (graph node order).
DistributionTensor observable_joint(const CausalGraph& g, const Individual& ind);

// Sum out every target not in `keep`; requires no conditions. Order of kept
// variables follows the input tensor.
DistributionTensor marginalize(const DistributionTensor& dist,
                               std::span<const std::string> keep);

}  // namespace causalfront
