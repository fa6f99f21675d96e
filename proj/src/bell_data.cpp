#include "causalfront/bell_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace causalfront {

namespace {

constexpr double kPi = std::numbers::pi;

Mat4 outer(const std::array<complexd, 4>& v) {
    Mat4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i * 4 + j] = v[i] * std::conj(v[j]);
    return m;
}

using Mat2 = std::array<complexd, 4>;

Mat2 projector(double angle, int outcome) {
    // outcome 0: cos t |H> + sin t |V>; outcome 1: the orthogonal state.
    const double c = std::cos(angle), s = std::sin(angle);
    const double m0 = outcome == 0 ? c : -s;
    const double m1 = outcome == 0 ? s : c;
    return {complexd(m0 * m0), complexd(m0 * m1), complexd(m1 * m0), complexd(m1 * m1)};
}

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    m[(2 * i + k) * 4 + (2 * j + l)] = a[i * 2 + j] * b[k * 2 + l];
    return m;
}

double trace_product(const Mat4& a, const Mat4& b) {
    complexd t = 0;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) t += a[i * 4 + k] * b[k * 4 + i];
    return t.real();
}

}  // namespace

Mat4 GammaState::density_matrix() const {
    const double r = 1.0 / std::sqrt(2.0);
    const std::array<complexd, 4> phi_plus{0.0, r, r, 0.0};    // (|HV> + |VH>)/sqrt2
    const std::array<complexd, 4> phi_minus{0.0, r, -r, 0.0};  // (|HV> - |VH>)/sqrt2
    const Mat4 pp = outer(phi_plus), pm = outer(phi_minus);
    Mat4 rho;
    for (int i = 0; i < 16; ++i)
        rho[i] = 0.5 * (1.0 + gamma) * pp[i] + 0.5 * (1.0 - gamma) * pm[i];
    return rho;
}

MeasurementSettings MeasurementSettings::chsh_optimal() {
    return MeasurementSettings{{0.0, -kPi / 4.0}, {3.0 * kPi / 8.0, 5.0 * kPi / 8.0}};
}

FrequencyTable generate_frequencies(double gamma, const MeasurementSettings& settings,
                                    std::optional<long long> shots, RngStream* rng) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("gamma must lie in [0,1]");
    const Mat4 rho = GammaState{gamma}.density_matrix();

    FrequencyTable table;
    table.observable_vars = {"a", "b", "x", "y"};
    table.values = Tensor(Shape{2, 2, 2, 2}, 0.0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) {
                    const Mat4 m = kron(projector(settings.alice[x], a),
                                        projector(settings.bob[y], b));
                    double p = 0.25 * trace_product(rho, m);
                    if (p < 0.0 && p > -1e-15) p = 0.0;  // numerical dust
                    table.values.at(std::array{a, b, x, y}) = p;
                }

    if (shots) {
        if (*shots <= 0) throw std::invalid_argument("shots must be positive");
        RngStream local(0);
        RngStream& r = rng ? *rng : local;
        std::array<double, 16> cdf{};
        double acc = 0;
        for (int i = 0; i < 16; ++i) {
            acc += table.values.v[i];
            cdf[i] = acc;
        }
        std::array<long long, 16> counts{};
        for (long long s = 0; s < *shots; ++s) {
            const double u = r.uniform() * acc;
            int cell = 0;
            while (cell < 15 && u >= cdf[cell]) ++cell;
            ++counts[cell];
        }
        for (int i = 0; i < 16; ++i)
            table.values.v[i] = static_cast<double>(counts[i]) / static_cast<double>(*shots);
    }
    table.normalized = true;
    return table;
}

double chsh(const FrequencyTable& freq) {
    const std::vector<std::string> order{"a", "b", "x", "y"};
    const FrequencyTable f = reorder(freq, order);
    for (int d : f.values.shape)
        if (d != 2) throw std::invalid_argument("chsh requires binary a,b,x,y");

    double correlator[2][2];
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            double setting = 0, e = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double p = f.values.at(std::array{a, b, x, y});
                    setting += p;
                    e += ((a + b) % 2 == 0 ? p : -p);
                }
            if (setting <= 0.0)
                throw std::invalid_argument("setting pair without support");
            correlator[x][y] = e / setting;
        }
    return correlator[0][0] - correlator[1][0] + correlator[0][1] + correlator[1][1];
}

CausalGraph make_bell_graph(std::span<const Edge> extra_edges, int lambda_dim) {
    std::vector<NodeSpec> nodes{
        {"lambda", lambda_dim, false, {}},
        {"x", 2, true, {}},
        {"y", 2, true, {}},
        {"a", 2, true, {"x", "lambda"}},
        {"b", 2, true, {"y", "lambda"}},
    };
    std::vector<Edge> penalized;
    for (const auto& e : extra_edges) {
        bool placed = false;
        for (auto& n : nodes)
            if (n.name == e.to) {
                n.parents.insert(n.parents.begin(), e.from);
                placed = true;
            }
        if (!placed) throw std::invalid_argument("unknown edge target: " + e.to);
        penalized.push_back(e);
    }
    return CausalGraph(std::move(nodes), std::move(penalized));
}

}  // namespace causalfront
