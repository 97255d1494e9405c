#include <doctest.h>

#include <cmath>

#include "linucb/policies.hpp"
#include "linucb/synthenv.hpp"
#include "oracles.hpp"

using namespace linucb;

namespace {

const Backend be = Backend::scalar();

Vector<double> vec2(double a, double b) { return Vector<double>(std::vector<double>{a, b}); }

}  // namespace

TEST_CASE("fresh model with identical contexts scores alpha*|x| and picks arm 0") {
    BanditConfig cfg{3, 2, 0, 0.7, 1.0};
    for (Variant v : {Variant::standard, Variant::optimized}) {
        auto m = DisjointModel<double>::make(cfg, v);
        OpCounter c;
        const auto x = vec2(0.6, 0.8);  // unit norm
        const Decision dec = disjoint_select(m, {x, x, x}, be, c);
        CHECK(dec.chosen_arm == 0);
        for (double p : dec.scores) CHECK(p == doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("alpha=0 with zero b gives all-zero scores and arm 0") {
    BanditConfig cfg{4, 3, 0, 0.0, 1.0};
    auto m = DisjointModel<double>::make(cfg, Variant::optimized);
    OpCounter c;
    SplitMix64 rng(3);
    std::vector<Vector<double>> ctxs;
    for (int a = 0; a < 4; ++a) ctxs.push_back(oracles::random_vector(rng, 3));
    const Decision dec = disjoint_select(m, ctxs, be, c);
    CHECK(dec.chosen_arm == 0);
    for (double p : dec.scores) CHECK(p == 0.0);
}

TEST_CASE("select after one update matches the closed-form 2x2 inverse oracle") {
    BanditConfig cfg{2, 2, 0, 1.0, 1.0};
    OpCounter c;
    for (Variant v : {Variant::standard, Variant::optimized}) {
        auto m = DisjointModel<double>::make(cfg, v);
        const auto x = vec2(1.0, 0.0);
        disjoint_update(m, 0, x, 1.0, be, c);

        // oracle: A = I + x x^T, theta = A^-1 b via the closed-form inverse
        Matrix<double> A = Matrix<double>::identity(2);
        A(0, 0) += 1.0;
        const auto a_inv = oracles::inv2x2(A);
        const auto ctx = vec2(0.8, 0.6);
        double theta_dot = 0.0, quad = 0.0;
        for (int i = 0; i < 2; ++i) {
            double ti = 0.0, wi = 0.0;
            for (int j = 0; j < 2; ++j) {
                ti += a_inv(i, j) * (j == 0 ? 1.0 : 0.0);  // b = r*x = e0
                wi += a_inv(i, j) * ctx[j];
            }
            theta_dot += ti * ctx[i];
            quad += wi * ctx[i];
        }
        const double expect0 = theta_dot + std::sqrt(quad);
        const double expect1 = 1.0;  // untouched arm: alpha*|ctx| = 1

        const Decision dec = disjoint_select(m, {ctx, ctx}, be, c);
        CHECK(std::fabs(dec.scores[0] - expect0) <= 1e-12);
        CHECK(std::fabs(dec.scores[1] - expect1) <= 1e-12);
    }
}

TEST_CASE("standard update: zero context is a no-op; known update by hand") {
    BanditConfig cfg{2, 2, 0, 1.0, 1.0};
    auto m = DisjointModel<double>::make(cfg, Variant::standard);
    OpCounter c;

    disjoint_update_standard(m, 0, Vector<double>(2), 0.5, be, c);
    CHECK(m.A[0] == Matrix<double>::identity(2));
    CHECK(m.b[0] == Vector<double>(2));

    disjoint_update_standard(m, 0, vec2(1.0, 0.0), 2.0, be, c);
    Matrix<double> expect = Matrix<double>::identity(2);
    expect(0, 0) = 2.0;
    CHECK(m.A[0] == expect);
    CHECK(m.b[0] == vec2(2.0, 0.0));
}

TEST_CASE("standard update: 50 random updates equal the from-scratch accumulation") {
    BanditConfig cfg{2, 4, 0, 1.0, 2.5};
    auto m = DisjointModel<double>::make(cfg, Variant::standard);
    OpCounter c;
    SplitMix64 rng(11);

    Matrix<double> scratch_A = Matrix<double>::scaled_identity(4, 2.5);
    Vector<double> scratch_b(4);
    for (int i = 0; i < 50; ++i) {
        const auto x = oracles::random_vector(rng, 4);
        const double r = rng.uniform01();
        disjoint_update_standard(m, 1, x, r, be, c);
        for (int a = 0; a < 4; ++a)
            for (int b2 = 0; b2 < 4; ++b2) scratch_A(a, b2) += x[a] * x[b2];
        for (int a = 0; a < 4; ++a) scratch_b[a] += r * x[a];
    }
    CHECK(oracles::direct_frobenius_diff(m.A[1], scratch_A) <= 1e-12);
    for (int i = 0; i < 4; ++i) CHECK(std::fabs(m.b[1][i] - scratch_b[i]) <= 1e-12);
    CHECK(m.t == 50);
}

TEST_CASE("optimized update: zero context leaves the inverse untouched, denominator 1") {
    BanditConfig cfg{1, 3, 0, 1.0, 1.0};
    auto m = DisjointModel<double>::make(cfg, Variant::optimized);
    OpCounter c;
    disjoint_update_optimized(m, 0, Vector<double>(3), 1.0, be, c);
    CHECK(m.A[0] == Matrix<double>::identity(3));
    CHECK(m.last_denominator == 1.0);
}

TEST_CASE("optimized update: scalar Sherman-Morrison case d=1") {
    BanditConfig cfg{1, 1, 0, 1.0, 1.0};
    auto m = DisjointModel<double>::make(cfg, Variant::optimized);
    OpCounter c;
    disjoint_update_optimized(m, 0, Vector<double>(std::vector<double>{1.0}), 1.0, be, c);
    CHECK(m.A[0](0, 0) == 0.5);
    CHECK(m.last_denominator == 2.0);
}

TEST_CASE("optimized update matches full re-inversion on a developed random state") {
    BanditConfig cfg{1, 4, 0, 1.0, 1.0};
    SplitMix64 rng(13);
    OpCounter c;
    for (int trial = 0; trial < 25; ++trial) {
        auto m = DisjointModel<double>::make(cfg, Variant::optimized);
        Matrix<double> direct = Matrix<double>::identity(4);
        for (int i = 0; i < 12; ++i) {
            const auto x = oracles::random_vector(rng, 4);
            disjoint_update_optimized(m, 0, x, rng.uniform01(), be, c);
            for (int a = 0; a < 4; ++a)
                for (int b2 = 0; b2 < 4; ++b2) direct(a, b2) += x[a] * x[b2];
            CHECK(m.last_denominator > 1.0);
        }
        CHECK(frobenius_diff(m.A[0], lu_invert(direct, be, c)) <= 1e-10);
    }
}

TEST_CASE("updates reject the wrong variant and bad arms") {
    BanditConfig cfg{2, 2, 0, 1.0, 1.0};
    auto std_m = DisjointModel<double>::make(cfg, Variant::standard);
    auto opt_m = DisjointModel<double>::make(cfg, Variant::optimized);
    OpCounter c;
    const auto x = vec2(1.0, 0.0);
    CHECK_THROWS_AS(disjoint_update_optimized(std_m, 0, x, 1.0, be, c), UsageError);
    CHECK_THROWS_AS(disjoint_update_standard(opt_m, 0, x, 1.0, be, c), UsageError);
    CHECK_THROWS_AS(disjoint_update_standard(std_m, 5, x, 1.0, be, c), DimensionError);
    CHECK_THROWS_AS(disjoint_select(std_m, {x}, be, c), DimensionError);
    CHECK_THROWS_AS(disjoint_select(std_m, {x, Vector<double>(3)}, be, c), DimensionError);
}

TEST_CASE("standard select propagates singularity from the inversion") {
    BanditConfig cfg{2, 2, 0, 1.0, 1.0};
    auto m = DisjointModel<double>::make(cfg, Variant::standard);
    m.A[1] = Matrix<double>(2, 2);  // corrupted: singular direct matrix
    OpCounter c;
    const auto x = vec2(1.0, 0.0);
    CHECK_THROWS_AS(disjoint_select(m, {x, x}, be, c), SingularMatrixError);
}

TEST_CASE("bad configs are rejected") {
    CHECK_THROWS_AS(DisjointModel<double>::make(BanditConfig{0, 2, 0, 1.0, 1.0}, Variant::standard),
                    UsageError);
    CHECK_THROWS_AS(DisjointModel<double>::make(BanditConfig{2, 2, 0, -0.5, 1.0}, Variant::standard),
                    UsageError);
    CHECK_THROWS_AS(DisjointModel<double>::make(BanditConfig{2, 2, 0, 1.0, 0.0}, Variant::standard),
                    UsageError);
}

TEST_CASE("policy_step composes select and update") {
    BanditConfig cfg{3, 3, 0, 0.5, 1.0};
    SyntheticEnv env(EnvConfig{3, 3, 0, 0.0, 99});
    OpCounter c;

    auto m1 = DisjointModel<double>::make(cfg, Variant::optimized);
    auto m2 = DisjointModel<double>::make(cfg, Variant::optimized);
    const auto ctxs = env.disjoint_contexts(1);

    const auto [dec, r] = policy_step(m1, ctxs, [&](int arm) { return env.reward(1, arm); }, be, c);
    const Decision manual = disjoint_select(m2, ctxs, be, c);
    disjoint_update(m2, manual.chosen_arm, ctxs[manual.chosen_arm], env.reward(1, manual.chosen_arm), be, c);

    CHECK(dec.chosen_arm == manual.chosen_arm);
    CHECK(m1.A[dec.chosen_arm] == m2.A[dec.chosen_arm]);
    CHECK(m1.b[dec.chosen_arm] == m2.b[dec.chosen_arm]);
    CHECK(m1.t == 1);
}

TEST_CASE("independent standard and optimized runs choose identical actions for 100 steps") {
    BanditConfig cfg{4, 4, 0, 1.0, 1.0};
    SyntheticEnv env(EnvConfig{4, 4, 0, 0.1, 7});
    OpCounter c;
    auto m_std = DisjointModel<double>::make(cfg, Variant::standard);
    auto m_opt = DisjointModel<double>::make(cfg, Variant::optimized);
    for (int t = 1; t <= 100; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        const auto [ds, rs] = policy_step(m_std, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
        const auto [dopt, ro] = policy_step(m_opt, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
        CHECK(ds.chosen_arm == dopt.chosen_arm);
    }
}

TEST_CASE("permuting arm order permutes scores and maps the chosen arm") {
    BanditConfig cfg{4, 3, 0, 0.8, 1.0};
    SyntheticEnv env(EnvConfig{4, 3, 0, 0.1, 21});
    OpCounter c;
    auto m = DisjointModel<double>::make(cfg, Variant::optimized);
    for (int t = 1; t <= 20; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        policy_step(m, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
    }

    const auto ctxs = env.disjoint_contexts(21);
    const Decision base = disjoint_select(m, ctxs, be, c);

    const int perm[4] = {2, 0, 3, 1};  // position i holds old arm perm[i]
    auto pm = DisjointModel<double>::make(cfg, Variant::optimized);
    std::vector<Vector<double>> pctxs;
    for (int i = 0; i < 4; ++i) {
        pm.A[i] = m.A[perm[i]];
        pm.b[i] = m.b[perm[i]];
        pctxs.push_back(ctxs[perm[i]]);
    }
    const Decision permuted = disjoint_select(pm, pctxs, be, c);
    for (int i = 0; i < 4; ++i) CHECK(permuted.scores[i] == base.scores[perm[i]]);
    CHECK(permuted.scores[permuted.chosen_arm] == base.scores[base.chosen_arm]);
}

TEST_CASE("fixed-point disjoint policy runs end to end") {
    BanditConfig cfg{3, 4, 0, 1.0, 1.0};
    SyntheticEnv env(EnvConfig{3, 4, 0, 0.1, 5});
    OpCounter c;
    auto m = DisjointModel<q16>::make(cfg, Variant::optimized);
    for (int t = 1; t <= 50; ++t) {
        const auto dctx = env.disjoint_contexts(t);
        std::vector<Vector<q16>> ctxs;
        for (const auto& x : dctx) ctxs.push_back(convert<q16>(x));
        const auto [dec, r] = policy_step(m, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
        CHECK(dec.chosen_arm >= 0);
        CHECK(m.last_denominator >= 1.0);
    }
    CHECK(m.t == 50);
}
