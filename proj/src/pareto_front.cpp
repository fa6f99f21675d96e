#include "causalfront/pareto_front.hpp"

#include <algorithm>
#include <cmath>

namespace causalfront {

bool ParetoFront::offer(const FitnessVector& fitness, const Individual& individual) {
    if (any_dominator(fitness.values)) return false;
    prune_strictly_dominated(fitness.values);
    entries_.push_back(Entry{FrontMember{fitness, individual}, true});
    pending_.push_back(static_cast<int>(entries_.size()) - 1);
    ++alive_count_;
    ++insertions_since_build_;
    maybe_rebuild();
    return true;
}

bool ParetoFront::would_accept(const FitnessVector& fitness) const {
    return !any_dominator(fitness.values);
}

std::vector<const FrontMember*> ParetoFront::members() const {
    std::vector<const FrontMember*> out;
    out.reserve(alive_count_);
    for (const auto& e : entries_)
        if (e.alive) out.push_back(&e.m);
    return out;
}

std::vector<FitnessVector> ParetoFront::fitnesses() const {
    std::vector<FitnessVector> out;
    out.reserve(alive_count_);
    for (const auto& e : entries_)
        if (e.alive) out.push_back(e.m.fitness);
    return out;
}

bool ParetoFront::any_dominator(std::span<const double> q) const {
    if (root_ >= 0) {
        if (tree_any_dominator(root_, q)) return true;
        for (int i : pending_) {
            const auto& e = entries_[i];
            if (e.alive && dominates_or_equals(std::span<const double>(e.m.fitness.values), q))
                return true;
        }
        return false;
    }
    for (const auto& e : entries_)
        if (e.alive && dominates_or_equals(std::span<const double>(e.m.fitness.values), q))
            return true;
    return false;
}

bool ParetoFront::tree_any_dominator(int node, std::span<const double> q) const {
    const KdNode& n = tree_[node];
    for (std::size_t k = 0; k < q.size(); ++k)
        if (n.lo[k] > q[k]) return false;  // nothing in this box can dominate q
    const Entry& e = entries_[n.entry];
    if (e.alive && dominates_or_equals(std::span<const double>(e.m.fitness.values), q))
        return true;
    if (n.left >= 0 && tree_any_dominator(n.left, q)) return true;
    if (n.right >= 0 && tree_any_dominator(n.right, q)) return true;
    return false;
}

void ParetoFront::prune_strictly_dominated(std::span<const double> q) {
    if (root_ >= 0) {
        std::vector<int> doomed;
        tree_collect_dominated(root_, q, doomed);
        for (int i : doomed) {
            entries_[i].alive = false;
            --alive_count_;
        }
        for (int i : pending_) {
            auto& e = entries_[i];
            if (e.alive && strictly_dominates(q, std::span<const double>(e.m.fitness.values))) {
                e.alive = false;
                --alive_count_;
            }
        }
        return;
    }
    for (auto& e : entries_)
        if (e.alive && strictly_dominates(q, std::span<const double>(e.m.fitness.values))) {
            e.alive = false;
            --alive_count_;
        }
}

void ParetoFront::tree_collect_dominated(int node, std::span<const double> q,
                                         std::vector<int>& out) const {
    const KdNode& n = tree_[node];
    for (std::size_t k = 0; k < q.size(); ++k)
        if (n.hi[k] < q[k]) return;  // nothing in this box is dominated by q
    const Entry& e = entries_[n.entry];
    if (e.alive && strictly_dominates(q, std::span<const double>(e.m.fitness.values)))
        out.push_back(n.entry);
    if (n.left >= 0) tree_collect_dominated(n.left, q, out);
    if (n.right >= 0) tree_collect_dominated(n.right, q, out);
}

void ParetoFront::maybe_rebuild() {
    if (alive_count_ < kLinearThreshold) {
        // Pure linear mode; compact occasionally so dead entries do not pile up.
        if (entries_.size() > 2 * alive_count_ + 16 && root_ < 0) rebuild();
        return;
    }
    if (root_ < 0 || insertions_since_build_ * 2 > alive_count_) rebuild();
}

void ParetoFront::rebuild() {
    std::vector<Entry> compact;
    compact.reserve(alive_count_);
    for (auto& e : entries_)
        if (e.alive) compact.push_back(std::move(e));
    entries_ = std::move(compact);
    pending_.clear();
    tree_.clear();
    root_ = -1;
    insertions_since_build_ = 0;
    if (alive_count_ >= kLinearThreshold) {
        std::vector<int> items(entries_.size());
        for (std::size_t i = 0; i < items.size(); ++i) items[i] = static_cast<int>(i);
        tree_.reserve(items.size());
        root_ = build_tree(items, 0, static_cast<int>(items.size()), 0);
    }
}

int ParetoFront::build_tree(std::vector<int>& items, int lo, int hi, int depth) {
    if (lo >= hi) return -1;
    const int dim = static_cast<int>(entries_[items[lo]].m.fitness.values.size());
    const int axis = depth % dim;
    const int mid = (lo + hi) / 2;
    std::nth_element(items.begin() + lo, items.begin() + mid, items.begin() + hi,
                     [&](int a, int b) {
                         const double va = entries_[a].m.fitness.values[axis];
                         const double vb = entries_[b].m.fitness.values[axis];
                         if (va != vb) return va < vb;
                         return a < b;
                     });
    KdNode node;
    node.entry = items[mid];
    const auto& v = entries_[node.entry].m.fitness.values;
    node.lo.assign(v.begin(), v.end());
    node.hi.assign(v.begin(), v.end());
    const int self = static_cast<int>(tree_.size());
    tree_.push_back(std::move(node));
    const int left = build_tree(items, lo, mid, depth + 1);
    const int right = build_tree(items, mid + 1, hi, depth + 1);
    tree_[self].left = left;
    tree_[self].right = right;
    for (int child : {left, right})
        if (child >= 0)
            for (std::size_t k = 0; k < tree_[self].lo.size(); ++k) {
                tree_[self].lo[k] = std::min(tree_[self].lo[k], tree_[child].lo[k]);
                tree_[self].hi[k] = std::max(tree_[self].hi[k], tree_[child].hi[k]);
            }
    return self;
}

bool EpsilonArchive::eps_dominates(std::span<const double> u, std::span<const double> w) const {
    for (std::size_t k = 0; k < u.size(); ++k)
        if (u[k] > w[k] + (epsilon_abs + epsilon_rel * std::abs(w[k]))) return false;
    return true;
}

bool EpsilonArchive::offer(const FitnessVector& fitness, const Individual& individual) {
    const std::span<const double> w(fitness.values);
    for (const auto& m : members_)
        if (eps_dominates(std::span<const double>(m.fitness.values), w)) return false;
    members_.erase(std::remove_if(members_.begin(), members_.end(),
                                  [&](const FrontMember& m) {
                                      return strictly_dominates(
                                          w, std::span<const double>(m.fitness.values));
                                  }),
                   members_.end());
    members_.push_back(FrontMember{fitness, individual});
    return true;
}

std::vector<FitnessVector> EpsilonArchive::fitnesses() const {
    std::vector<FitnessVector> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.fitness);
    return out;
}

}  // namespace causalfront
