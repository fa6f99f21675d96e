#pragma once

#include <span>
#include <vector>

#include "causalfront/fitness.hpp"

namespace causalfront {

// Dominated hypervolume of a minimization point set against a reference
// point; points not strictly below the reference in every coordinate are
// ignored. Supports 1-3 objectives.
double hypervolume(std::span<const std::vector<double>> points, std::span<const double> reference);

double hypervolume(std::span<const FitnessVector> points, std::span<const double> reference);

}  // namespace causalfront
