#include <doctest.h>

#include "causalfront/bell_data.hpp"
#include "causalfront/bounds.hpp"
#include "causalfront/evolution.hpp"
#include "support/oracles.hpp"

using namespace causalfront;

TEST_CASE("theorem bound: anchor values, validity domain, monotonicity") {
    CHECK(theorem_bound({0.0, 0.3}) == doctest::Approx(0.0));
    // 2*0.1*(4*0.25-0.1) / (0.25*(2*0.25-0.1)) = 0.2*0.9 / (0.25*0.4)
    CHECK(theorem_bound({0.1, 0.25}) == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(bound_applicable({0.4, 0.25}));
    CHECK(!bound_applicable({0.5, 0.25}));
    CHECK_THROWS_AS(theorem_bound({0.5, 0.25}), std::domain_error);
    CHECK_THROWS_AS(theorem_bound({0.1, 0.0}), std::domain_error);

    // increasing in tau, decreasing in f_star on the valid domain
    double prev = -1;
    for (double tau = 0.0; tau < 0.5; tau += 0.01) {
        const double b = theorem_bound({tau, 0.25});
        CHECK(b >= prev);
        prev = b;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double fs = 0.26; fs <= 1.0; fs += 0.01) {
        const double b = theorem_bound({0.5, fs});
        CHECK(b <= prev + 1e-12);
        prev = b;
    }
}

TEST_CASE("min marginal frequency") {
    SUBCASE("uniform binary a,y gives 0.25") {
        FrequencyTable t;
        t.observable_vars = {"a", "y"};
        t.values = Tensor(Shape{2, 2}, 0.25);
        const std::vector<std::string> y{"y"};
        CHECK(min_marginal_frequency(t, "a", y) == doctest::Approx(0.25));
    }
    SUBCASE("a zero cell gives 0") {
        FrequencyTable t;
        t.observable_vars = {"a", "y"};
        t.values = Tensor(Shape{2, 2});
        t.values.v = {0.5, 0.5, 0.0, 0.0};
        const std::vector<std::string> y{"y"};
        CHECK(min_marginal_frequency(t, "a", y) == doctest::Approx(0.0));
    }
    SUBCASE("synthetic Bell table matches the direct marginalization oracle") {
        const auto table = generate_frequencies(0.984);
        const std::vector<std::string> y{"y"};
        double expected = std::numeric_limits<double>::infinity();
        for (int a = 0; a < 2; ++a)
            for (int yv = 0; yv < 2; ++yv) {
                double s = 0;
                for (int b = 0; b < 2; ++b)
                    for (int x = 0; x < 2; ++x)
                        s += table.values.at(std::array{a, b, x, yv});
                expected = std::min(expected, s);
            }
        CHECK(min_marginal_frequency(table, "a", y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("harmonic mean") {
    CHECK(harmonic_mean(0.37, 0.37) == doctest::Approx(0.37));
    CHECK(harmonic_mean(1.0, 1.0 / 3.0) == doctest::Approx(0.5));
    CHECK(harmonic_mean(0.25, 0.25) == doctest::Approx(0.25));
    CHECK(harmonic_mean(0.1, 0.9) == doctest::Approx(harmonic_mean(0.9, 0.1)));
    CHECK(harmonic_mean(0.1, 0.9) <= 2 * 0.1);
    CHECK_THROWS_AS(harmonic_mean(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(harmonic_mean(0.5, -1.0), std::invalid_argument);
}

namespace {

// || p(u|v) - q(u|v) ||_1 and the lemma's right-hand side for a fixed v.
std::pair<double, double> lemma2_sides(const Tensor& p, const Tensor& q, int v) {
    const int nu = p.shape[0];
    double pv = 0, qv = 0;
    for (int u = 0; u < nu; ++u) {
        pv += p.at(std::array{u, v});
        qv += q.at(std::array{u, v});
    }
    double lhs = 0, num = 0;
    for (int u = 0; u < nu; ++u) {
        lhs += std::abs(p.at(std::array{u, v}) / pv - q.at(std::array{u, v}) / qv);
        num += std::abs(p.at(std::array{u, v}) - q.at(std::array{u, v}));
    }
    num += std::abs(pv - qv);
    return {lhs, num / harmonic_mean(pv, qv)};
}

}  // namespace

TEST_CASE("lemma 2 inequality holds on random bivariate distributions and is tight on the reference example") {
    RngStream rng(5);
    const std::vector<std::string> uv{"u", "v"};
    for (int t = 0; t < 300; ++t) {
        const auto p = oracles::random_table(rng, uv, {3, 2});
        const auto q = oracles::random_table(rng, uv, {3, 2});
        for (int v = 0; v < 2; ++v) {
            const auto [lhs, rhs] = lemma2_sides(p.values, q.values, v);
            CHECK(lhs <= rhs + 1e-12);
        }
    }

    // binary u,v; p uniform; q perfectly correlated: equality
    Tensor p(Shape{2, 2}, 0.25);
    Tensor q(Shape{2, 2}, 0.0);
    q.at(std::array{0, 0}) = 0.5;
    q.at(std::array{1, 1}) = 0.5;
    for (int v = 0; v < 2; ++v) {
        const auto [lhs, rhs] = lemma2_sides(p, q, v);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
    }
}

TEST_CASE("lemma 3: fixed-model influence deviation bound on random models") {
    const auto g = make_bell_graph(std::array{Edge{"a", "b"}});
    RngStream rng(23);
    const std::vector<std::string> cond{"y"};
    for (int t = 0; t < 40; ++t) {
        const auto ind = create_individual(g, rng);
        const auto freq = oracles::random_table(rng, {"a", "b", "x", "y"}, {2, 2, 2, 2});

        Evaluator ev(g, freq, g.penalized_edges());
        const auto fit = ev.evaluate(ind);
        const double model_tvd = fit.values[0];
        const double c_model = fit.values[1];
        const double c_emp = causal_influence_empirical(freq, {"a", "b"}, cond).value;

        // min over (a,y) of H(Pr(a,y|M), F(a,y))
        const std::vector<std::string> ay{"a", "y"};
        const auto model_ay = marginal_of(to_frequency_table(observable_joint(g, ind)), ay);
        const auto freq_ay = marginal_of(freq, ay);
        double min_h = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < model_ay.size(); ++i)
            min_h = std::min(min_h, harmonic_mean(model_ay.v[i], freq_ay.v[i]));

        CHECK(std::abs(c_emp - c_model) <= 4.0 * model_tvd / min_h + 1e-9);
    }
}

TEST_CASE("audit_front") {
    const auto freq = generate_frequencies(0.984);
    const std::vector<std::string> cond{"y"};
    const Edge edge{"a", "b"};

    SUBCASE("empty front gives an empty report") {
        const auto report = audit_points({}, freq, edge, cond);
        CHECK(report.points.empty());
        CHECK(report.ok());
    }
    SUBCASE("tau = 0 requires the model influence to equal the empirical influence") {
        const double c_emp = causal_influence_empirical(freq, edge, cond).value;
        std::vector<std::pair<double, double>> pts{{0.0, c_emp}};
        auto report = audit_points(pts, freq, edge, cond);
        CHECK(report.ok());
        pts[0].second = c_emp + 1e-6;
        report = audit_points(pts, freq, edge, cond);
        CHECK(!report.ok());
        CHECK(report.violations == 1);
    }
    SUBCASE("points beyond the validity domain are inapplicable, not failed") {
        const double f_star = min_marginal_frequency(freq, edge.from, cond);
        std::vector<std::pair<double, double>> pts{{2.0 * f_star + 0.01, 2.0}};
        const auto report = audit_points(pts, freq, edge, cond);
        CHECK(report.ok());
        REQUIRE(report.points.size() == 1);
        CHECK(!report.points[0].applicable);
    }
    SUBCASE("named objective lookup works on fitness vectors") {
        auto names = std::make_shared<const std::vector<std::string>>(
            std::vector<std::string>{"TVD", "C[a->b]"});
        FitnessVector f;
        f.names = names;
        f.values = {0.1, causal_influence_empirical(freq, edge, cond).value};
        const std::vector<FitnessVector> front{f};
        const auto report = audit_front(front, freq, edge, cond);
        CHECK(report.points.size() == 1);
        CHECK(report.ok());
    }
}

TEST_CASE("every evolved model respects the theorem on synthetic data") {
    // Direct run-time check of the universal bound on a small evolved front.
    const auto g = make_bell_graph(std::array{Edge{"a", "b"}});
    const auto freq = generate_frequencies(0.984);
    EvolutionConfig cfg;
    cfg.mu = cfg.lambda = 24;
    cfg.generations = 40;
    cfg.seed = 99;
    const auto result = run_evolution(g, freq, cfg);
    const std::vector<std::string> cond{"y"};
    const auto report = audit_front(result.front.fitnesses(), freq, {"a", "b"}, cond);
    CHECK(!report.points.empty());
    CHECK(report.violations == 0);
}
