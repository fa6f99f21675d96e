#include "causalfront/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace causalfront {

double theorem_bound(const BoundInput& in) {
    if (!bound_applicable(in))
        throw std::domain_error("bound inapplicable: requires 0 <= tau < 2*f_star and f_star in (0,1]");
    return 2.0 * in.tau * (4.0 * in.f_star - in.tau) /
           (in.f_star * (2.0 * in.f_star - in.tau));
}

double min_marginal_frequency(const FrequencyTable& freq, const std::string& a,
                              std::span<const std::string> y) {
    std::vector<std::string> keep{a};
    keep.insert(keep.end(), y.begin(), y.end());
    Tensor m = marginal_of(freq, keep);
    double total = m.sum();
    if (total <= 0.0) throw std::invalid_argument("empty frequency table");
    return *std::min_element(m.v.begin(), m.v.end()) / total;
}

double harmonic_mean(double x1, double x2) {
    if (x1 <= 0.0 || x2 <= 0.0)
        throw std::invalid_argument("harmonic_mean requires positive arguments");
    return 2.0 * x1 * x2 / (x1 + x2);
}

AuditReport audit_points(std::span<const std::pair<double, double>> tau_and_c,
                         const FrequencyTable& freq, const Edge& edge,
                         std::span<const std::string> conditioning) {
    AuditReport report;
    report.edge = edge;
    report.f_star = min_marginal_frequency(freq, edge.from, conditioning);
    report.c_empirical = causal_influence_empirical(freq, edge, conditioning).value;
    for (const auto& [tau, c_model] : tau_and_c) {
        AuditPoint p;
        p.tau = tau;
        p.c_model = c_model;
        p.c_empirical = report.c_empirical;
        p.applicable = bound_applicable({tau, report.f_star});
        if (p.applicable) {
            p.bound = theorem_bound({tau, report.f_star});
            p.ok = std::abs(report.c_empirical - c_model) <= p.bound + kAuditSlack;
            if (!p.ok) ++report.violations;
        }
        report.points.push_back(p);
    }
    return report;
}

AuditReport audit_front(std::span<const FitnessVector> front, const FrequencyTable& freq,
                        const Edge& edge, std::span<const std::string> conditioning) {
    const std::string wanted = "C[" + edge_label(edge) + "]";
    std::vector<std::pair<double, double>> pairs;
    for (const auto& f : front) {
        if (f.values.empty()) throw std::invalid_argument("empty fitness vector");
        double c = 0.0;
        bool found = false;
        for (std::size_t k = 0; k < f.size(); ++k)
            if (f.name(k) == wanted) {
                c = f.values[k];
                found = true;
                break;
            }
        if (!found)
            throw std::invalid_argument("front carries no objective " + wanted);
        pairs.emplace_back(f.values[0], c);
    }
    return audit_points(pairs, freq, edge, conditioning);
}

}  // namespace causalfront
