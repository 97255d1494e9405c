#include <doctest.h>

#include <cstdio>

#include "linucb/bench.hpp"
#include "linucb/snapshot.hpp"
#include "linucb/synthenv.hpp"

using namespace linucb;

namespace {
const Backend be = Backend::scalar();
}

TEST_CASE("disjoint float64 snapshot round-trips bit-exactly") {
    BanditConfig cfg{3, 4, 0, 0.7, 1.5};
    SyntheticEnv env(EnvConfig{3, 4, 0, 0.1, 50});
    OpCounter c;
    auto m = DisjointModel<double>::make(cfg, Variant::optimized);
    for (int t = 1; t <= 40; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        policy_step(m, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
    }

    const std::string path = "snapshot_disjoint_test.json";
    save_model(m, path);
    const auto loaded = disjoint_from_json<double>(load_snapshot(path));
    std::remove(path.c_str());

    CHECK(loaded.t == m.t);
    CHECK(loaded.variant == m.variant);
    CHECK(loaded.cfg.alpha == m.cfg.alpha);
    CHECK(loaded.cfg.lambda == m.cfg.lambda);
    for (int a = 0; a < cfg.n_arms; ++a) {
        CHECK(loaded.A[a] == m.A[a]);
        CHECK(loaded.b[a] == m.b[a]);
    }
}

TEST_CASE("hybrid q16 snapshot preserves raw values") {
    BanditConfig cfg{2, 2, 2, 1.0, 1.0};
    SyntheticEnv env(EnvConfig{2, 2, 2, 0.1, 51});
    OpCounter c;
    auto m = HybridModel<q16>::make(cfg, Variant::optimized);
    for (int t = 1; t <= 15; ++t) {
        const auto dctx = env.hybrid_contexts(t);
        std::vector<HybridContext<q16>> ctxs;
        for (const auto& hc : dctx) ctxs.push_back({convert<q16>(hc.z), convert<q16>(hc.x)});
        policy_step(m, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
    }

    const std::string path = "snapshot_hybrid_test.json";
    save_model(m, path);
    const auto loaded = hybrid_from_json<q16>(load_snapshot(path));
    std::remove(path.c_str());

    CHECK(loaded.t == m.t);
    CHECK(loaded.A0 == m.A0);
    CHECK(loaded.b0 == m.b0);
    for (int a = 0; a < cfg.n_arms; ++a) {
        CHECK(loaded.A[a] == m.A[a]);
        CHECK(loaded.B[a] == m.B[a]);
        CHECK(loaded.b[a] == m.b[a]);
    }
}

TEST_CASE("snapshots reject mismatched kind and element type") {
    BanditConfig cfg{2, 2, 0, 1.0, 1.0};
    auto m = DisjointModel<double>::make(cfg, Variant::standard);
    const auto j = to_json(m);
    CHECK_THROWS_AS(hybrid_from_json<double>(j), UsageError);
    CHECK_THROWS_AS(disjoint_from_json<q16>(j), UsageError);
    auto bad = j;
    bad["version"] = 2;
    CHECK_THROWS_AS(disjoint_from_json<double>(bad), UsageError);
}

TEST_CASE("a resumed policy run continues bit-identically") {
    BanditConfig cfg{3, 3, 0, 1.0, 1.0};
    SyntheticEnv env(EnvConfig{3, 3, 0, 0.1, 52});
    OpCounter c;

    auto full = DisjointModel<double>::make(cfg, Variant::optimized);
    for (int t = 1; t <= 80; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        policy_step(full, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
    }

    auto first = DisjointModel<double>::make(cfg, Variant::optimized);
    for (int t = 1; t <= 40; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        policy_step(first, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
    }
    const std::string path = "snapshot_resume_test.json";
    save_model(first, path);
    auto resumed = disjoint_from_json<double>(load_snapshot(path));
    std::remove(path.c_str());
    for (int t = 41; t <= 80; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        policy_step(resumed, ctxs, [&](int a) { return env.reward(t, a); }, be, c);
    }

    CHECK(resumed.t == full.t);
    for (int a = 0; a < cfg.n_arms; ++a) {
        CHECK(resumed.A[a] == full.A[a]);
        CHECK(resumed.b[a] == full.b[a]);
    }
}

TEST_CASE("a resumed drift run reproduces the single-run series") {
    RunSpec spec;
    spec.d = 3;
    spec.f = 0;
    spec.n_arms = 3;
    spec.steps = 60;
    spec.sample_every = 10;
    spec.seed = 53;

    const std::string state = "runstate_test.json";
    RunSpec first = spec;
    first.steps = 30;
    run_drift(first, 0, "", state);
    RunSpec second = spec;
    const std::string resumed = run_drift(second, 0, state, "");
    std::remove(state.c_str());

    const std::string full = run_drift(spec, 0, "", "");
    // the resumed output contains exactly the rows of the second half
    CHECK(resumed.substr(0, resumed.find('\n')) == full.substr(0, full.find('\n')));
    // compare the tail rows of the full run with the resumed run's rows
    std::vector<std::string> full_lines, resumed_lines;
    {
        std::stringstream ss(full);
        std::string line;
        while (std::getline(ss, line)) full_lines.push_back(line);
    }
    {
        std::stringstream ss(resumed);
        std::string line;
        while (std::getline(ss, line)) resumed_lines.push_back(line);
    }
    REQUIRE(resumed_lines.size() > 1);
    const std::size_t tail = resumed_lines.size() - 1;
    REQUIRE(full_lines.size() > tail);
    for (std::size_t i = 0; i < tail; ++i) {
        CHECK(resumed_lines[i + 1] == full_lines[full_lines.size() - tail + i]);
    }
}
