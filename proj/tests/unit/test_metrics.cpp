#include <doctest.h>

#include "causalfront/bell_data.hpp"
#include "causalfront/evolution.hpp"
#include "causalfront/metrics.hpp"
#include "support/oracles.hpp"

using namespace causalfront;

namespace {

FitnessVector fv(std::initializer_list<double> values) {
    static const auto names = std::make_shared<const std::vector<std::string>>(
        std::vector<std::string>{"TVD", "C[a->b]", "C[x->lambda]"});
    FitnessVector f;
    f.names = names;
    f.values = values;
    return f;
}

}  // namespace

TEST_CASE("tvd: identity, disjoint point masses, random oracle, contract checks") {
    RngStream rng(2);
    const auto g = make_bell_graph();
    const auto ind = create_individual(g, rng);
    const auto joint = observable_joint(g, ind);

    SUBCASE("identical distributions give 0") {
        CHECK(tvd(joint, to_frequency_table(joint)) == doctest::Approx(0.0));
    }
    SUBCASE("disjoint point masses give 2") {
        FrequencyTable p1 = to_frequency_table(joint), p2 = p1;
        std::fill(p1.values.v.begin(), p1.values.v.end(), 0.0);
        std::fill(p2.values.v.begin(), p2.values.v.end(), 0.0);
        p1.values.v[0] = 1.0;
        p2.values.v[5] = 1.0;
        CHECK(tvd(p1, p2) == doctest::Approx(2.0));
    }
    SUBCASE("random pair matches elementwise summation oracle") {
        for (int t = 0; t < 20; ++t) {
            auto f1 = oracles::random_table(rng, joint.target_vars, joint.target_shape);
            auto f2 = oracles::random_table(rng, joint.target_vars, joint.target_shape);
            CHECK(tvd(f1, f2) == doctest::Approx(oracles::brute_tvd(f1.values, f2.values))
                                     .epsilon(1e-12));
        }
    }
    SUBCASE("shape or order mismatch is rejected") {
        FrequencyTable wrong = to_frequency_table(joint);
        std::swap(wrong.observable_vars[0], wrong.observable_vars[1]);
        CHECK_THROWS_AS(tvd(joint, wrong), std::invalid_argument);
    }
}

TEST_CASE("tvd behaves as a metric on random normalized tables") {
    RngStream rng(9);
    const std::vector<std::string> vars{"u", "v"};
    for (int t = 0; t < 50; ++t) {
        const auto a = oracles::random_table(rng, vars, {3, 2});
        const auto b = oracles::random_table(rng, vars, {3, 2});
        const auto c = oracles::random_table(rng, vars, {3, 2});
        CHECK(tvd(a, b) == doctest::Approx(tvd(b, a)).epsilon(1e-12));
        CHECK(tvd(a, a) == doctest::Approx(0.0));
        CHECK(tvd(a, c) <= tvd(a, b) + tvd(b, c) + 1e-12);
        CHECK(tvd(a, b) >= 0.0);
        CHECK(tvd(a, b) <= 2.0 + 1e-12);
    }
}

TEST_CASE("lemma 1: marginalization contracts the TVD") {
    RngStream rng(77);
    const auto g = make_bell_graph();
    for (int t = 0; t < 20; ++t) {
        const auto ind = create_individual(g, rng);
        const auto joint = observable_joint(g, ind);
        const auto freq =
            oracles::random_table(rng, joint.target_vars, joint.target_shape);

        const double full = tvd(joint, freq);
        const std::vector<std::string> ab{"a", "b"}, b_only{"b"};
        const auto model_ab = marginalize(joint, ab);
        FrequencyTable freq_ab{model_ab.target_vars, marginal_of(freq, model_ab.target_vars), true};
        const double mid = tvd(model_ab, freq_ab);
        const auto model_b = marginalize(joint, b_only);
        FrequencyTable freq_b{model_b.target_vars, marginal_of(freq, model_b.target_vars), true};
        const double small = tvd(model_b, freq_b);

        CHECK(small <= mid + 1e-12);
        CHECK(mid <= full + 1e-12);
    }
}

TEST_CASE("causal influence of a model: degenerate, deterministic, and oracle cases") {
    SUBCASE("target tensor constant in the source index gives 0") {
        CausalGraph g({{"a", 2, true, {}}, {"y", 2, true, {}}, {"b", 2, true, {"a", "y"}}},
                      {{"a", "b"}});
        Individual ind;
        ind.tensors.push_back(Tensor(Shape{2}, 0.5));
        ind.tensors.push_back(Tensor(Shape{2}, 0.5));
        Tensor b(Shape{2, 2, 2});
        // b depends on y only
        for (int bv = 0; bv < 2; ++bv)
            for (int av = 0; av < 2; ++av)
                for (int yv = 0; yv < 2; ++yv)
                    b.at(std::array{bv, av, yv}) = bv == 0 ? (yv == 0 ? 0.3 : 0.9)
                                                           : (yv == 0 ? 0.7 : 0.1);
        ind.tensors.push_back(std::move(b));
        const auto r = causal_influence_model(g, ind, {"a", "b"});
        CHECK(r.value == doctest::Approx(0.0));
        CHECK(!r.degenerate);
    }
    SUBCASE("b deterministically copying a gives 2") {
        CausalGraph g({{"a", 2, true, {}}, {"b", 2, true, {"a"}}}, {{"a", "b"}});
        Individual ind;
        ind.tensors.push_back(Tensor(Shape{2}, 0.5));
        Tensor b(Shape{2, 2});
        b.v = {1.0, 0.0, 0.0, 1.0};  // b == a
        ind.tensors.push_back(std::move(b));
        CHECK(causal_influence_model(g, ind, {"a", "b"}).value == doctest::Approx(2.0));
    }
    SUBCASE("random tensors on the a->b graph match the brute-force oracle") {
        const auto g = make_bell_graph(std::array{Edge{"a", "b"}});
        RngStream rng(15);
        for (int t = 0; t < 15; ++t) {
            const auto ind = create_individual(g, rng);
            const auto r = causal_influence_model(g, ind, {"a", "b"});
            CHECK(r.value ==
                  doctest::Approx(oracles::brute_influence_model(g, ind, {"a", "b"}))
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("grandparent overlap is excluded from the conditioning set") {
    // x -> a and x -> b, a -> b: x is a parent of b and also a grandparent
    // (parent of a), so only y remains in the conditioning set.
    CausalGraph g({{"x", 2, true, {}},
                   {"y", 2, true, {}},
                   {"a", 2, true, {"x"}},
                   {"b", 2, true, {"a", "x", "y"}}},
                  {{"a", "b"}});
    const auto k = influence_conditioning_set(g, {"a", "b"});
    CHECK(k == std::vector<std::string>{"y"});

    const auto bell = make_bell_graph(std::array{Edge{"a", "b"}});
    CHECK(influence_conditioning_set(bell, {"a", "b"}) == std::vector<std::string>{"y"});
}

TEST_CASE("empirical causal influence: factorized, correlated, and oracle cases") {
    SUBCASE("factorized table has no influence") {
        RngStream rng(4);
        FrequencyTable t;
        t.observable_vars = {"a", "b", "y"};
        t.values = Tensor(Shape{2, 2, 2});
        const double pa[2] = {0.4, 0.6}, py[2] = {0.7, 0.3};
        const double pb_y[2][2] = {{0.2, 0.8}, {0.9, 0.1}};  // [y][b]
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int y = 0; y < 2; ++y)
                    t.values.at(std::array{a, b, y}) = pa[a] * pb_y[y][b] * py[y];
        const std::vector<std::string> cond{"y"};
        CHECK(causal_influence_empirical(t, {"a", "b"}, cond).value ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("perfectly correlated binary table gives 2") {
        FrequencyTable t;
        t.observable_vars = {"a", "b"};
        t.values = Tensor(Shape{2, 2});
        t.values.v = {0.5, 0.0, 0.0, 0.5};
        CHECK(causal_influence_empirical(t, {"a", "b"}, {}).value == doctest::Approx(2.0));
    }
    SUBCASE("synthetic Bell table at gamma=1 matches the brute-force oracle") {
        const auto table = generate_frequencies(1.0);
        const std::vector<std::string> cond{"y"};
        const auto r = causal_influence_empirical(table, {"a", "b"}, cond);
        CHECK(r.value ==
              doctest::Approx(oracles::brute_influence_empirical(table, {"a", "b"}, cond))
                  .epsilon(1e-10));
        CHECK(r.value > 0.1);  // entangled data shows a->b dependence
    }
}

TEST_CASE("influence is invariant under relabeling of the source values") {
    const auto g = make_bell_graph(std::array{Edge{"a", "b"}});
    RngStream rng(21);
    for (int t = 0; t < 10; ++t) {
        auto ind = create_individual(g, rng);
        const double before = causal_influence_model(g, ind, {"a", "b"}).value;

        // swap the two values of a everywhere it appears
        Tensor& a_t = ind.tensors[g.index_of("a")];  // [a, x, lambda]
        const std::size_t cols = a_t.size() / 2;
        for (std::size_t c = 0; c < cols; ++c) std::swap(a_t.v[c], a_t.v[cols + c]);
        Tensor& b_t = ind.tensors[g.index_of("b")];  // [b, a, y, lambda]
        std::vector<int> idx(b_t.shape.size(), 0);
        Tensor relabeled = b_t;
        do {
            auto src = idx;
            src[1] = 1 - src[1];
            relabeled.at(idx) = b_t.at(src);
        } while (next_index(b_t.shape, idx));
        b_t = std::move(relabeled);

        const double after = causal_influence_model(g, ind, {"a", "b"}).value;
        CHECK(after == doctest::Approx(before).epsilon(1e-10));
    }
}

TEST_CASE("model influence equals empirical influence on an all-observable graph") {
    RngStream rng(31);
    for (int t = 0; t < 20; ++t) {
        auto g = oracles::random_dag(rng);
        // all observable variant
        auto nodes = g.nodes();
        for (auto& n : nodes) n.observable = true;
        const auto edges = oracles::edges_of(g);
        if (edges.empty()) continue;
        const Edge edge = edges[rng.uniform_int(static_cast<int>(edges.size()))];
        CausalGraph g_obs(nodes, {edge});

        const auto ind = create_individual(g_obs, rng);
        const auto model_side = causal_influence_model(g_obs, ind, edge);
        const auto table = to_frequency_table(observable_joint(g_obs, ind));
        const auto cond = influence_conditioning_set(g_obs, edge);
        const auto empirical_side = causal_influence_empirical(table, edge, cond);
        CHECK(model_side.value == doctest::Approx(empirical_side.value).epsilon(1e-9));
    }
}

TEST_CASE("dominance predicates") {
    CHECK(dominates(fv({0.1, 0.2, 0.0}), fv({0.1, 0.2, 0.0})));
    CHECK(!dominates_strictly(fv({0.1, 0.2, 0.0}), fv({0.1, 0.2, 0.0})));
    CHECK(dominates_strictly(fv({0.1, 0.1, 0.0}), fv({0.2, 0.2, 0.0})));
    CHECK(!dominates(fv({0.1, 0.3, 0.0}), fv({0.3, 0.1, 0.0})));
    CHECK(!dominates(fv({0.3, 0.1, 0.0}), fv({0.1, 0.3, 0.0})));

    FitnessVector other;
    other.names = std::make_shared<const std::vector<std::string>>(
        std::vector<std::string>{"TVD"});
    other.values = {0.1};
    CHECK_THROWS_AS(dominates(fv({0.1, 0.2, 0.0}), other), std::invalid_argument);
}

TEST_CASE("dominance is a partial order on random fitness vectors") {
    RngStream rng(8);
    std::vector<FitnessVector> fs;
    for (int i = 0; i < 30; ++i)
        fs.push_back(fv({rng.uniform(), rng.uniform(), rng.uniform()}));
    for (const auto& f1 : fs) {
        CHECK(dominates(f1, f1));  // reflexive
        for (const auto& f2 : fs)
            for (const auto& f3 : fs)
                if (dominates(f1, f2) && dominates(f2, f3)) CHECK(dominates(f1, f3));
    }
    for (const auto& f1 : fs)
        for (const auto& f2 : fs)
            if (dominates(f1, f2) && dominates(f2, f1)) CHECK(f1.values == f2.values);
}
