#pragma once

#include <cstddef>
#include <vector>

#include "causalfront/causal_graph.hpp"
#include "causalfront/fitness.hpp"

namespace causalfront {

struct FrontMember {
    FitnessVector fitness;
    Individual individual;
};

// Global Pareto front with a k-d tree over fitness space for dominance
// queries. Linear scan below kLinearThreshold members; the tree is rebuilt
// once insertions since the last build exceed half the live member count.
class ParetoFront {
public:
    static constexpr std::size_t kLinearThreshold = 64;

    // Inserts unless an existing member dominates-or-equals the candidate;
    // on insertion, members the candidate strictly dominates are removed.
    bool offer(const FitnessVector& fitness, const Individual& individual);

    bool would_accept(const FitnessVector& fitness) const;

    std::size_t size() const { return alive_count_; }
    bool empty() const { return alive_count_ == 0; }

    // Live members in insertion order.
    std::vector<const FrontMember*> members() const;
    std::vector<FitnessVector> fitnesses() const;

private:
    struct Entry {
        FrontMember m;
        bool alive = true;
    };
    struct KdNode {
        int entry = -1;
        int left = -1, right = -1;
        std::vector<double> lo, hi;  // subtree bounding box in fitness space
    };

    bool any_dominator(std::span<const double> q) const;
    bool tree_any_dominator(int node, std::span<const double> q) const;
    void prune_strictly_dominated(std::span<const double> q);
    void tree_collect_dominated(int node, std::span<const double> q, std::vector<int>& out) const;
    void rebuild();
    int build_tree(std::vector<int>& items, int lo, int hi, int depth);
    void maybe_rebuild();

    std::vector<Entry> entries_;
    std::vector<KdNode> tree_;
    int root_ = -1;
    std::vector<int> pending_;  // live entries not yet in the tree
    std::size_t alive_count_ = 0;
    std::size_t insertions_since_build_ = 0;
};

// Epsilon-dominance archive accumulating non-dominated individuals across
// runs. A member u eps-dominates candidate w iff for every objective k,
// u_k <= w_k + (epsilon_abs + epsilon_rel*|w_k|).
class EpsilonArchive {
public:
    double epsilon_abs = 1e-8;
    double epsilon_rel = 1e-5;

    // Accepts unless some member eps-dominates the candidate; on acceptance,
    // members the candidate strictly dominates (exact dominance) are removed.
    bool offer(const FitnessVector& fitness, const Individual& individual);

    bool eps_dominates(std::span<const double> u, std::span<const double> w) const;

    std::size_t size() const { return members_.size(); }
    const std::vector<FrontMember>& members() const { return members_; }
    std::vector<FitnessVector> fitnesses() const;

private:
    std::vector<FrontMember> members_;
};

}  // namespace causalfront
