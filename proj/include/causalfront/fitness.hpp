#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace causalfront {

// Objective vector, all components minimized. Entry 0 is always the TVD,
// followed by one causal-influence entry per penalized edge. Objective names
// are shared between all vectors produced by the same evaluator.
struct FitnessVector {
    std::shared_ptr<const std::vector<std::string>> names;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    const std::string& name(std::size_t k) const { return (*names)[k]; }
};

// f1 <= f2 in every component.
inline bool dominates_or_equals(std::span<const double> f1, std::span<const double> f2) {
    for (std::size_t k = 0; k < f1.size(); ++k)
        if (f1[k] > f2[k]) return false;
    return true;
}

// f1 <= f2 in every component and strictly smaller in at least one.
inline bool strictly_dominates(std::span<const double> f1, std::span<const double> f2) {
    bool strict = false;
    for (std::size_t k = 0; k < f1.size(); ++k) {
        if (f1[k] > f2[k]) return false;
        if (f1[k] < f2[k]) strict = true;
    }
    return strict;
}

inline bool dominates_or_equals(const FitnessVector& f1, const FitnessVector& f2) {
    return dominates_or_equals(std::span<const double>(f1.values),
                               std::span<const double>(f2.values));
}

inline bool strictly_dominates(const FitnessVector& f1, const FitnessVector& f2) {
    return strictly_dominates(std::span<const double>(f1.values),
                              std::span<const double>(f2.values));
}

}  // namespace causalfront
