#pragma once

#include <span>
#include <string>
#include <vector>

#include "causalfront/causal_graph.hpp"
#include "causalfront/fitness.hpp"
#include "causalfront/metrics.hpp"

namespace causalfront {

// Inputs of the analytic trade-off bound: tau is the TVD budget, f_star the
// minimum empirical marginal frequency over joint assignments of the edge
// source and its conditioning set. The bound applies only when tau < 2*f_star.
struct BoundInput {
    double tau = 0.0;
    double f_star = 0.0;
};

inline bool bound_applicable(const BoundInput& in) {
    return in.tau >= 0.0 && in.f_star > 0.0 && in.f_star <= 1.0 && in.tau < 2.0 * in.f_star;
}

// 2*tau*(4*f_star - tau) / (f_star*(2*f_star - tau)); increasing in tau on the
// valid range. Throws std::domain_error when the bound does not apply.
double theorem_bound(const BoundInput& in);

// min over all assignments (a, y...) of the marginal F(a, y...).
double min_marginal_frequency(const FrequencyTable& freq, const std::string& a,
                              std::span<const std::string> y);

// H(x1, x2) = 2*x1*x2 / (x1 + x2); both arguments must be positive.
double harmonic_mean(double x1, double x2);

struct AuditPoint {
    double tau = 0.0;
    double c_model = 0.0;
    double c_empirical = 0.0;
    double bound = 0.0;   // meaningful only when applicable
    bool applicable = false;
    bool ok = true;       // applicable points: |c_empirical - c_model| <= bound + slack
};

struct AuditReport {
    Edge edge;
    double f_star = 0.0;
    double c_empirical = 0.0;
    std::vector<AuditPoint> points;
    std::size_t violations = 0;
    bool ok() const { return violations == 0; }
};

// Slack absorbing floating-point error in the compared quantities.
constexpr double kAuditSlack = 1e-9;

// Checks each (tau, C_model) pair against the bound around C(F). Points with
// tau >= 2*f_star are marked inapplicable, not failed.
AuditReport audit_points(std::span<const std::pair<double, double>> tau_and_c,
                         const FrequencyTable& freq, const Edge& edge,
                         std::span<const std::string> conditioning);

// Convenience overload: tau is objective 0 and the model influence is the
// objective named "C[from->to]" in each fitness vector.
AuditReport audit_front(std::span<const FitnessVector> front, const FrequencyTable& freq,
                        const Edge& edge, std::span<const std::string> conditioning);

}  // namespace causalfront
