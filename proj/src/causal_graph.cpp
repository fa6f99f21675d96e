#include "causalfront/causal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace causalfront {

std::string edge_label(const Edge& e) { return e.from + "->" + e.to; }

Edge parse_edge(const std::string& label) {
    const auto pos = label.find("->");
    if (pos == std::string::npos || pos == 0 || pos + 2 >= label.size())
        throw std::invalid_argument("bad edge label: " + label);
    return Edge{label.substr(0, pos), label.substr(pos + 2)};
}

bool ValidationReport::has(ValidationIssue::Kind k) const {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const ValidationIssue& i) { return i.kind == k; });
}

ValidationReport validate_graph(std::span<const NodeSpec> nodes,
                                std::span<const Edge> penalized_edges) {
    ValidationReport report;
    auto add = [&](ValidationIssue::Kind k, std::string d) {
        report.issues.push_back({k, std::move(d)});
    };

    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        const auto& n = nodes[i];
        if (!index.emplace(n.name, i).second)
            add(ValidationIssue::Kind::DuplicateNodeName, n.name);
        if (n.cardinality < 1)
            add(ValidationIssue::Kind::BadCardinality, n.name);
        std::set<std::string> seen;
        for (const auto& p : n.parents) {
            if (p == n.name) add(ValidationIssue::Kind::SelfParent, n.name);
            if (!seen.insert(p).second)
                add(ValidationIssue::Kind::DuplicateParent, n.name + " <- " + p);
        }
    }
    for (const auto& n : nodes)
        for (const auto& p : n.parents)
            if (!index.count(p))
                add(ValidationIssue::Kind::DanglingParent, n.name + " <- " + p);

    // Cycle detection by Kahn peeling over resolvable parents.
    const int m = static_cast<int>(nodes.size());
    std::vector<int> remaining_parents(m, 0);
    std::vector<std::vector<int>> children(m);
    for (int i = 0; i < m; ++i) {
        for (const auto& p : nodes[i].parents) {
            auto it = index.find(p);
            if (it == index.end() || it->second == i) continue;
            ++remaining_parents[i];
            children[it->second].push_back(i);
        }
    }
    std::vector<int> queue;
    for (int i = 0; i < m; ++i)
        if (remaining_parents[i] == 0) queue.push_back(i);
    int peeled = 0;
    while (!queue.empty()) {
        int u = queue.back();
        queue.pop_back();
        ++peeled;
        for (int c : children[u])
            if (--remaining_parents[c] == 0) queue.push_back(c);
    }
    if (peeled < m) {
        std::string members;
        for (int i = 0; i < m; ++i)
            if (remaining_parents[i] > 0) members += (members.empty() ? "" : ",") + nodes[i].name;
        add(ValidationIssue::Kind::Cycle, members);
    }

    for (const auto& e : penalized_edges) {
        auto to = index.find(e.to);
        bool present = index.count(e.from) && to != index.end() &&
                       std::find(nodes[to->second].parents.begin(),
                                 nodes[to->second].parents.end(),
                                 e.from) != nodes[to->second].parents.end();
        if (!present) add(ValidationIssue::Kind::PenalizedEdgeMissing, edge_label(e));
    }
    return report;
}

CausalGraph::CausalGraph(std::vector<NodeSpec> nodes, std::vector<Edge> penalized_edges)
    : nodes_(std::move(nodes)), penalized_edges_(std::move(penalized_edges)) {
    auto report = validate_graph(nodes_, penalized_edges_);
    if (!report.ok()) {
        std::string msg = "invalid causal graph:";
        for (const auto& i : report.issues) msg += " [" + i.detail + "]";
        throw std::invalid_argument(msg);
    }
    for (int i = 0; i < node_count(); ++i) index_[nodes_[i].name] = i;
    parent_idx_.resize(nodes_.size());
    for (int i = 0; i < node_count(); ++i) {
        for (const auto& p : nodes_[i].parents) parent_idx_[i].push_back(index_.at(p));
        if (nodes_[i].observable) observable_.push_back(i);
    }
}

int CausalGraph::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown node: " + name);
    return it->second;
}

std::optional<int> CausalGraph::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool CausalGraph::has_edge(int from, int to) const {
    const auto& ps = parent_idx_[to];
    return std::find(ps.begin(), ps.end(), from) != ps.end();
}

std::vector<int> CausalGraph::grandparent_overlap(int j) const {
    std::set<int> grand;
    for (int p : parent_idx_[j])
        for (int gp : parent_idx_[p]) grand.insert(gp);
    std::vector<int> out;
    for (int p : parent_idx_[j])
        if (grand.count(p)) out.push_back(p);
    return out;
}

std::vector<std::string> CausalGraph::observable_names() const {
    std::vector<std::string> out;
    for (int i : observable_) out.push_back(nodes_[i].name);
    return out;
}

Shape CausalGraph::tensor_shape(int i) const {
    Shape s{nodes_[i].cardinality};
    for (int p : parent_idx_[i]) s.push_back(nodes_[p].cardinality);
    return s;
}

bool is_valid_cpt(const Tensor& t, double tol) {
    for (double x : t.v)
        if (!(x >= 0.0 && x <= 1.0)) return false;
    if (t.shape.empty()) return false;
    const std::size_t cols = t.size() / static_cast<std::size_t>(t.shape[0]);
    for (std::size_t c = 0; c < cols; ++c) {
        double s = 0;
        for (int j = 0; j < t.shape[0]; ++j) s += t.v[j * cols + c];
        if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
}

bool is_valid_individual(const CausalGraph& g, const Individual& ind, double tol) {
    if (static_cast<int>(ind.tensors.size()) != g.node_count()) return false;
    for (int i = 0; i < g.node_count(); ++i) {
        if (ind.tensors[i].shape != g.tensor_shape(i)) return false;
        if (!is_valid_cpt(ind.tensors[i], tol)) return false;
    }
    return true;
}

namespace {

// Ancestor closure per Alg. 2: repeatedly union in parents not yet included.
std::vector<int> ancestor_closure(const CausalGraph& g, std::vector<int> start) {
    std::vector<char> in(g.node_count(), 0);
    for (int i : start) in[i] = 1;
    std::vector<int> frontier = std::move(start);
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int i : frontier)
            for (int p : g.parents(i))
                if (!in[p]) {
                    in[p] = 1;
                    next.push_back(p);
                }
        frontier = std::move(next);
    }
    std::vector<int> closure;
    for (int i = 0; i < g.node_count(); ++i)
        if (in[i]) closure.push_back(i);
    return closure;
}

}  // namespace

DistributionTensor joint_distribution(const CausalGraph& g, const Individual& ind,
                                      std::span<const std::string> targets,
                                      std::span<const std::string> conditions) {
    if (static_cast<int>(ind.tensors.size()) != g.node_count())
        throw std::invalid_argument("individual does not match graph");

    std::vector<int> held;
    std::vector<char> is_held(g.node_count(), 0);
    for (const auto& name : targets) {
        int i = g.index_of(name);
        if (is_held[i]) throw std::invalid_argument("repeated variable: " + name);
        is_held[i] = 1;
        held.push_back(i);
    }
    const std::size_t n_targets = held.size();
    for (const auto& name : conditions) {
        int i = g.index_of(name);
        if (is_held[i])
            throw std::invalid_argument("targets and conditions must be disjoint: " + name);
        is_held[i] = 1;
        held.push_back(i);
    }
    if (n_targets == 0) throw std::invalid_argument("no target variables");

    const std::vector<int> closure = ancestor_closure(g, held);
    std::vector<int> pos_in_closure(g.node_count(), -1);
    for (std::size_t k = 0; k < closure.size(); ++k) pos_in_closure[closure[k]] = static_cast<int>(k);

    Shape closure_shape;
    for (int i : closure) closure_shape.push_back(g.cardinality(i));

    // Per closure factor: positions of (own, parents...) in the closure index.
    struct Factor {
        const double* data;
        std::vector<int> pos;
        std::vector<std::size_t> strides;
    };
    std::vector<Factor> factors;
    for (int i : closure) {
        Factor f;
        f.data = ind.tensors[i].v.data();
        f.pos.push_back(pos_in_closure[i]);
        for (int p : g.parents(i)) f.pos.push_back(pos_in_closure[p]);
        f.strides = strides_of(ind.tensors[i].shape);
        factors.push_back(std::move(f));
    }

    DistributionTensor out;
    Shape held_shape;
    for (std::size_t k = 0; k < held.size(); ++k) {
        const auto& name = g.node(held[k]).name;
        if (k < n_targets) {
            out.target_vars.push_back(name);
            out.target_shape.push_back(g.cardinality(held[k]));
        } else {
            out.condition_vars.push_back(name);
            out.condition_shape.push_back(g.cardinality(held[k]));
        }
        held_shape.push_back(g.cardinality(held[k]));
    }
    out.values = Tensor(held_shape, 0.0);

    std::vector<int> held_pos;
    for (int i : held) held_pos.push_back(pos_in_closure[i]);

    // Contract: enumerate every closure assignment, multiply factors,
    // accumulate into the held-index cell.
    std::vector<int> idx(closure.size(), 0);
    do {
        double p = 1.0;
        for (const auto& f : factors) {
            std::size_t flat = 0;
            for (std::size_t k = 0; k < f.pos.size(); ++k)
                flat += f.strides[k] * static_cast<std::size_t>(idx[f.pos[k]]);
            p *= f.data[flat];
        }
        std::size_t cell = 0;
        for (std::size_t k = 0; k < held_pos.size(); ++k)
            cell = cell * static_cast<std::size_t>(held_shape[k]) +
                   static_cast<std::size_t>(idx[held_pos[k]]);
        out.values.v[cell] += p;
    } while (next_index(closure_shape, idx));

    const std::size_t cond_cells = shape_size(out.condition_shape);
    out.feasible.assign(cond_cells, 1);
    if (!out.condition_vars.empty()) {
        const std::size_t t_cells = shape_size(out.target_shape);
        // values layout: target indices outermost, condition indices innermost.
        std::vector<double> cond_marginal(cond_cells, 0.0);
        for (std::size_t t = 0; t < t_cells; ++t)
            for (std::size_t c = 0; c < cond_cells; ++c)
                cond_marginal[c] += out.values.v[t * cond_cells + c];
        for (std::size_t c = 0; c < cond_cells; ++c) {
            if (cond_marginal[c] < kFeasibilityThreshold) {
                out.feasible[c] = 0;
                for (std::size_t t = 0; t < t_cells; ++t) out.values.v[t * cond_cells + c] = 0.0;
            } else {
                for (std::size_t t = 0; t < t_cells; ++t) out.values.v[t * cond_cells + c] /= cond_marginal[c];
            }
        }
    }
    return out;
}

DistributionTensor observable_joint(const CausalGraph& g, const Individual& ind) {
    const auto names = g.observable_names();
    if (names.empty()) throw std::invalid_argument("graph has no observable nodes");
    return joint_distribution(g, ind, names);
}

DistributionTensor marginalize(const DistributionTensor& dist,
                               std::span<const std::string> keep) {
    if (!dist.condition_vars.empty())
        throw std::invalid_argument("marginalize requires an unconditional distribution");
    std::vector<char> keep_flag(dist.target_vars.size(), 0);
    for (const auto& name : keep) {
        auto it = std::find(dist.target_vars.begin(), dist.target_vars.end(), name);
        if (it == dist.target_vars.end())
            throw std::invalid_argument("keep variable not in distribution: " + name);
        keep_flag[it - dist.target_vars.begin()] = 1;
    }

    DistributionTensor out;
    std::vector<std::size_t> kept_axes;
    for (std::size_t k = 0; k < dist.target_vars.size(); ++k)
        if (keep_flag[k]) {
            out.target_vars.push_back(dist.target_vars[k]);
            out.target_shape.push_back(dist.target_shape[k]);
            kept_axes.push_back(k);
        }
    out.values = Tensor(out.target_shape, 0.0);
    out.feasible.assign(1, 1);

    std::vector<int> idx(dist.target_shape.size(), 0);
    const auto out_strides = strides_of(out.target_shape);
    std::size_t flat = 0;
    do {
        std::size_t cell = 0;
        for (std::size_t k = 0; k < kept_axes.size(); ++k)
            cell += out_strides[k] * static_cast<std::size_t>(idx[kept_axes[k]]);
        out.values.v[cell] += dist.values.v[flat++];
    } while (next_index(dist.target_shape, idx));
    return out;
}

}  // namespace causalfront
