#include "causalfront/hypervolume.hpp"

#include <algorithm>
#include <stdexcept>

namespace causalfront {

namespace {

double hv2d(std::vector<std::array<double, 2>> pts, double rx, double ry) {
    std::sort(pts.begin(), pts.end());
    double hv = 0, best_y = ry;
    for (const auto& p : pts)
        if (p[1] < best_y) {
            hv += (rx - p[0]) * (best_y - p[1]);
            best_y = p[1];
        }
    return hv;
}

}  // namespace

double hypervolume(std::span<const std::vector<double>> points,
                   std::span<const double> reference) {
    const std::size_t d = reference.size();
    if (d < 1 || d > 3) throw std::invalid_argument("hypervolume supports 1-3 objectives");

    std::vector<std::vector<double>> pts;
    for (const auto& p : points) {
        if (p.size() != d) throw std::invalid_argument("point dimension mismatch");
        bool inside = true;
        for (std::size_t k = 0; k < d; ++k)
            if (p[k] >= reference[k]) inside = false;
        if (inside) pts.push_back(p);
    }
    if (pts.empty()) return 0.0;

    if (d == 1) {
        double m = pts[0][0];
        for (const auto& p : pts) m = std::min(m, p[0]);
        return reference[0] - m;
    }
    if (d == 2) {
        std::vector<std::array<double, 2>> q;
        for (const auto& p : pts) q.push_back({p[0], p[1]});
        return hv2d(std::move(q), reference[0], reference[1]);
    }

    // d == 3: sweep slabs along the third axis; each slab contributes the 2D
    // hypervolume of all points at or below it.
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a[2] < b[2]; });
    double hv = 0;
    std::vector<std::array<double, 2>> active;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        active.push_back({pts[i][0], pts[i][1]});
        if (i + 1 < pts.size() && pts[i + 1][2] == pts[i][2]) continue;
        const double z_top = (i + 1 < pts.size()) ? pts[i + 1][2] : reference[2];
        hv += hv2d(active, reference[0], reference[1]) * (z_top - pts[i][2]);
    }
    return hv;
}

double hypervolume(std::span<const FitnessVector> points, std::span<const double> reference) {
    std::vector<std::vector<double>> raw;
    raw.reserve(points.size());
    for (const auto& f : points) raw.push_back(f.values);
    return hypervolume(raw, reference);
}

}  // namespace causalfront
