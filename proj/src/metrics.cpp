#include "causalfront/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace causalfront {

void normalize(FrequencyTable& table) {
    const double s = table.values.sum();
    if (s <= 0.0) throw std::invalid_argument("cannot normalize an all-zero table");
    for (double& x : table.values.v) x /= s;
    table.normalized = true;
}

FrequencyTable reorder(const FrequencyTable& table, std::span<const std::string> order) {
    if (order.size() != table.observable_vars.size())
        throw std::invalid_argument("reorder: variable count mismatch");
    std::vector<std::size_t> axis;  // axis[k] = position of order[k] in table
    for (const auto& name : order) {
        auto it = std::find(table.observable_vars.begin(), table.observable_vars.end(), name);
        if (it == table.observable_vars.end())
            throw std::invalid_argument("reorder: unknown variable " + name);
        axis.push_back(static_cast<std::size_t>(it - table.observable_vars.begin()));
    }
    std::set<std::size_t> unique(axis.begin(), axis.end());
    if (unique.size() != axis.size()) throw std::invalid_argument("reorder: repeated variable");

    FrequencyTable out;
    out.normalized = table.normalized;
    Shape new_shape;
    for (std::size_t a : axis) {
        out.observable_vars.push_back(table.observable_vars[a]);
        new_shape.push_back(table.values.shape[a]);
    }
    out.values = Tensor(new_shape, 0.0);

    const auto new_strides = strides_of(new_shape);
    std::vector<int> idx(table.values.shape.size(), 0);
    std::size_t flat = 0;
    do {
        std::size_t cell = 0;
        for (std::size_t k = 0; k < axis.size(); ++k)
            cell += new_strides[k] * static_cast<std::size_t>(idx[axis[k]]);
        out.values.v[cell] = table.values.v[flat++];
    } while (next_index(table.values.shape, idx));
    return out;
}

FrequencyTable to_frequency_table(const DistributionTensor& dist) {
    if (!dist.condition_vars.empty())
        throw std::invalid_argument("expected an unconditional distribution");
    return FrequencyTable{dist.target_vars, dist.values, true};
}

Tensor marginal_of(const FrequencyTable& table, std::span<const std::string> keep) {
    DistributionTensor d;
    d.target_vars = table.observable_vars;
    d.target_shape = table.values.shape;
    d.values = table.values;
    d.feasible.assign(1, 1);
    auto m = marginalize(d, keep);
    // marginalize preserves the table's variable order; permute to `keep` order.
    FrequencyTable ft{m.target_vars, m.values, table.normalized};
    std::vector<std::string> order(keep.begin(), keep.end());
    return reorder(ft, order).values;
}

double tvd(const DistributionTensor& model_joint, const FrequencyTable& freq) {
    if (!model_joint.condition_vars.empty())
        throw std::invalid_argument("tvd: model distribution must be unconditional");
    if (model_joint.target_vars != freq.observable_vars)
        throw std::invalid_argument("tvd: variable sets or index order differ");
    if (model_joint.values.shape != freq.values.shape)
        throw std::invalid_argument("tvd: shape mismatch");
    if (!freq.normalized) throw std::invalid_argument("tvd: frequency table not normalized");
    double s = 0;
    for (std::size_t i = 0; i < freq.values.size(); ++i)
        s += std::abs(model_joint.values.v[i] - freq.values.v[i]);
    return s;
}

double tvd(const FrequencyTable& a, const FrequencyTable& b) {
    DistributionTensor d;
    d.target_vars = a.observable_vars;
    d.target_shape = a.values.shape;
    d.values = a.values;
    d.feasible.assign(1, 1);
    return tvd(d, b);
}

std::vector<std::string> influence_conditioning_set(const CausalGraph& g, const Edge& edge) {
    const int to = g.index_of(edge.to);
    const int from = g.index_of(edge.from);
    const auto overlap = g.grandparent_overlap(to);
    std::set<int> drop(overlap.begin(), overlap.end());
    drop.insert(from);
    std::set<int> keep;
    for (int p : g.parents(to))
        if (!drop.count(p)) keep.insert(p);
    std::vector<std::string> out;
    for (int i = 0; i < g.node_count(); ++i)
        if (keep.count(i)) out.push_back(g.node(i).name);
    return out;
}

namespace {

// Shared max-L1 scan over a conditional tensor Pr(target | source, K).
// values shape: [target dims..., source dim, K dims...], feasibility per
// (source, K) cell.
InfluenceResult influence_from_conditional(const Tensor& values,
                                           const std::vector<std::uint8_t>& feasible,
                                           std::size_t target_cells, int source_dim,
                                           const Shape& k_shape) {
    InfluenceResult best;
    best.degenerate = true;
    const std::size_t k_cells = shape_size(k_shape);
    const std::size_t cond_cells = static_cast<std::size_t>(source_dim) * k_cells;
    std::vector<int> k_idx(k_shape.size(), 0);
    for (std::size_t k = 0; k < k_cells; ++k) {
        for (int v = 0; v < source_dim; ++v) {
            const std::size_t cv = static_cast<std::size_t>(v) * k_cells + k;
            if (!feasible[cv]) continue;
            for (int v2 = v + 1; v2 < source_dim; ++v2) {
                const std::size_t cv2 = static_cast<std::size_t>(v2) * k_cells + k;
                if (!feasible[cv2]) continue;
                double l1 = 0;
                for (std::size_t t = 0; t < target_cells; ++t)
                    l1 += std::abs(values.v[t * cond_cells + cv] - values.v[t * cond_cells + cv2]);
                if (best.degenerate || l1 > best.value) {
                    best.degenerate = false;
                    best.value = l1;
                    best.source_value = v;
                    best.source_value_alt = v2;
                    best.conditioning_assignment = k_idx;
                }
            }
        }
        next_index(k_shape, k_idx);
    }
    if (best.degenerate) best.value = 0.0;
    return best;
}

}  // namespace

InfluenceResult causal_influence_model(const CausalGraph& g, const Individual& ind,
                                       const Edge& edge) {
    const int to = g.index_of(edge.to);
    const int from = g.index_of(edge.from);
    const auto k_set = influence_conditioning_set(g, edge);

    std::vector<std::string> targets{g.node(to).name};
    std::vector<std::string> conditions{g.node(from).name};
    conditions.insert(conditions.end(), k_set.begin(), k_set.end());

    const auto cond = joint_distribution(g, ind, targets, conditions);
    Shape k_shape(cond.condition_shape.begin() + 1, cond.condition_shape.end());
    return influence_from_conditional(cond.values, cond.feasible,
                                      shape_size(cond.target_shape),
                                      cond.condition_shape[0], k_shape);
}

InfluenceResult causal_influence_empirical(const FrequencyTable& freq, const Edge& edge,
                                           std::span<const std::string> conditioning) {
    // Lay out the marginal as [target, source, conditioning...].
    std::vector<std::string> order{edge.to, edge.from};
    order.insert(order.end(), conditioning.begin(), conditioning.end());
    Tensor joint = marginal_of(freq, order);
    const double total = joint.sum();
    if (total <= 0.0) throw std::invalid_argument("empty frequency table");
    for (double& x : joint.v) x /= total;

    const int target_dim = joint.shape[0];
    const int source_dim = joint.shape[1];
    Shape k_shape(joint.shape.begin() + 2, joint.shape.end());
    const std::size_t k_cells = shape_size(k_shape);
    const std::size_t cond_cells = static_cast<std::size_t>(source_dim) * k_cells;

    // Conditional F(target | source, K) with feasibility from F(source, K).
    Tensor cond(joint.shape, 0.0);
    std::vector<std::uint8_t> feasible(cond_cells, 1);
    for (std::size_t c = 0; c < cond_cells; ++c) {
        double m = 0;
        for (int t = 0; t < target_dim; ++t) m += joint.v[t * cond_cells + c];
        if (m < kFeasibilityThreshold) {
            feasible[c] = 0;
            continue;
        }
        for (int t = 0; t < target_dim; ++t) cond.v[t * cond_cells + c] = joint.v[t * cond_cells + c] / m;
    }
    return influence_from_conditional(cond, feasible, static_cast<std::size_t>(target_dim),
                                      source_dim, k_shape);
}

namespace {
void check_same_objectives(const FitnessVector& f1, const FitnessVector& f2) {
    const bool same = f1.values.size() == f2.values.size() &&
                      (f1.names == f2.names || (f1.names && f2.names && *f1.names == *f2.names));
    if (!same) throw std::invalid_argument("fitness vectors have different objective lists");
}
}  // namespace

bool dominates(const FitnessVector& f1, const FitnessVector& f2) {
    check_same_objectives(f1, f2);
    return dominates_or_equals(f1, f2);
}

bool dominates_strictly(const FitnessVector& f1, const FitnessVector& f2) {
    check_same_objectives(f1, f2);
    return strictly_dominates(f1, f2);
}

}  // namespace causalfront
