#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "linucb/snapshot.hpp"
#include "linucb/stability.hpp"
#include "linucb/synthenv.hpp"

namespace linucb {

// One benchmark invocation.  Sweeps are deterministic: rows come out ordered
// by parameter tuple and every row repeats the full tuple.
struct RunSpec {
    std::vector<int> sizes{4, 8, 16, 32};  // kernels: n; disjoint: d sweep; hybrid: f sweep
    std::vector<int> simd_list{4};         // kernels experiment sweeps SIMD widths
    int d = 8;                             // fixed context length for hybrid / drift
    int f = 0;                             // drift & correction: 0 = disjoint, else hybrid
    int n_arms = 8;
    int simd = 4;
    std::int64_t steps = 50;
    std::uint64_t seed = 42;
    std::string variant = "both";    // std | opt | both
    std::string backend = "scalar";  // scalar | vector
    std::string elem = "f64";        // f64 | q16
    double alpha = 1.0;
    double lambda = 1.0;
    double noise_sigma = 0.1;
    std::int64_t sample_every = 10;
    std::int64_t period = 500;  // correction interval M
    bool time = false;          // append wall_time_s (makes output non-reproducible)
};

inline double loglog_slope(const std::vector<double>& sizes, const std::vector<double>& costs) {
    const int n = static_cast<int>(sizes.size());
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += std::log2(sizes[i]);
        my += std::log2(costs[i]);
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        num += (std::log2(sizes[i]) - mx) * (std::log2(costs[i]) - my);
        den += (std::log2(sizes[i]) - mx) * (std::log2(sizes[i]) - mx);
    }
    return num / den;
}

namespace detail {

inline Matrix<double> bench_spd(std::uint64_t seed, int n) {
    SplitMix64 rng(seed);
    Matrix<double> a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.uniform_sym();
    Matrix<double> out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int l = 0; l < n; ++l) acc += a(l, i) * a(l, j);
            out(i, j) = acc + (i == j ? 1.0 : 0.0);
        }
    return out;
}

template <class T>
void kernel_cost(const Matrix<T>& a, const Matrix<T>& b, const std::string& kernel, int simd,
                 std::uint64_t& scalar_ops, std::uint64_t& vector_slots) {
    OpCounter cs, cv;
    if (kernel == "add") {
        mat_add(a, b, Backend::scalar(), cs);
        mat_add(a, b, Backend::vector_model(simd), cv);
    } else if (kernel == "mul") {
        mat_mul(a, b, Backend::scalar(), cs);
        mat_mul(a, b, Backend::vector_model(simd), cv);
    } else {
        lu_invert(a, Backend::scalar(), cs);
        lu_invert(a, Backend::vector_model(simd), cv);
    }
    scalar_ops = cs.scalar_ops;
    vector_slots = cv.vector_slots;
}

}  // namespace detail

// Micro-costs of the three accelerated kernels: scalar ops, vector issue
// slots, and the modeled speedup (their ratio) per (kernel, n, simd).
inline std::string run_kernels(const RunSpec& spec) {
    std::ostringstream out;
    out << "experiment,kernel,n,simd,elem,seed,scalar_ops,vector_slots,speedup\n";
    for (const char* kernel : {"add", "mul", "invert"}) {
        for (int n : spec.sizes) {
            for (int simd : spec.simd_list) {
                const Matrix<double> a = detail::bench_spd(spec.seed, n);
                const Matrix<double> b = detail::bench_spd(spec.seed + 1, n);
                std::uint64_t so = 0, vs = 0;
                if (spec.elem == "q16") {
                    detail::kernel_cost(convert<q16>(a), convert<q16>(b), kernel, simd, so, vs);
                } else {
                    detail::kernel_cost(a, b, kernel, simd, so, vs);
                }
                out << csv_join({"kernels", kernel, std::to_string(n), std::to_string(simd), spec.elem,
                                 std::to_string(spec.seed), std::to_string(so), std::to_string(vs),
                                 csv_double(static_cast<double>(so) / static_cast<double>(vs))});
            }
        }
    }
    return out.str();
}

namespace detail {

struct PolicyCost {
    double scalar_per_step = 0.0;
    double slots_per_step = 0.0;
    double total_per_step = 0.0;
    double wall_s = 0.0;
};

template <class T>
PolicyCost run_policy_once(const RunSpec& spec, bool hybrid, int size, Variant variant) {
    BanditConfig cfg;
    cfg.n_arms = spec.n_arms;
    cfg.d = hybrid ? spec.d : size;
    cfg.f = hybrid ? size : 0;
    cfg.alpha = spec.alpha;
    cfg.lambda = spec.lambda;
    EnvConfig ec{cfg.n_arms, cfg.d, cfg.f, spec.noise_sigma, spec.seed};
    const SyntheticEnv env(ec);
    const Backend be = spec.backend == "vector" ? Backend::vector_model(spec.simd) : Backend::scalar();
    OpCounter c;
    const auto t0 = std::chrono::steady_clock::now();
    if (hybrid) {
        auto m = HybridModel<T>::make(cfg, variant);
        for (std::int64_t t = 1; t <= spec.steps; ++t) {
            const auto dctx = env.hybrid_contexts(t);
            std::vector<HybridContext<T>> ctxs;
            ctxs.reserve(dctx.size());
            for (const auto& hc : dctx) ctxs.push_back({convert<T>(hc.z), convert<T>(hc.x)});
            policy_step(m, ctxs, [&](int arm) { return env.reward(t, arm); }, be, c);
        }
    } else {
        auto m = DisjointModel<T>::make(cfg, variant);
        for (std::int64_t t = 1; t <= spec.steps; ++t) {
            const auto dctx = env.disjoint_contexts(t);
            std::vector<Vector<T>> ctxs;
            ctxs.reserve(dctx.size());
            for (const auto& x : dctx) ctxs.push_back(convert<T>(x));
            policy_step(m, ctxs, [&](int arm) { return env.reward(t, arm); }, be, c);
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    PolicyCost pc;
    pc.scalar_per_step = static_cast<double>(c.scalar_ops) / static_cast<double>(spec.steps);
    pc.slots_per_step = static_cast<double>(c.vector_slots) / static_cast<double>(spec.steps);
    pc.total_per_step = pc.scalar_per_step + pc.slots_per_step;
    pc.wall_s = std::chrono::duration<double>(t1 - t0).count();
    return pc;
}

}  // namespace detail

// Per-step op counts for the standard/optimized policy pair across the d
// (disjoint) or f (hybrid) sweep, the std/opt modeled speedup, and the
// log-log cost slope of each variant over the sweep.
inline std::string run_policy_bench(const RunSpec& spec, bool hybrid) {
    const bool want_std = spec.variant == "both" || spec.variant == "std";
    const bool want_opt = spec.variant == "both" || spec.variant == "opt";
    if (!want_std && !want_opt) throw UsageError("variant must be std, opt, or both");

    std::vector<detail::PolicyCost> std_costs(spec.sizes.size()), opt_costs(spec.sizes.size());
    for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
        for (int pass = 0; pass < 2; ++pass) {
            const Variant v = pass == 0 ? Variant::standard : Variant::optimized;
            if ((v == Variant::standard && !want_std) || (v == Variant::optimized && !want_opt)) continue;
            const auto cost = spec.elem == "q16"
                                  ? detail::run_policy_once<q16>(spec, hybrid, spec.sizes[i], v)
                                  : detail::run_policy_once<double>(spec, hybrid, spec.sizes[i], v);
            (v == Variant::standard ? std_costs : opt_costs)[i] = cost;
        }
    }

    std::vector<double> dsizes(spec.sizes.begin(), spec.sizes.end());
    double slope_std = 0.0, slope_opt = 0.0;
    if (want_std) {
        std::vector<double> ys;
        for (const auto& pc : std_costs) ys.push_back(pc.total_per_step);
        slope_std = loglog_slope(dsizes, ys);
    }
    if (want_opt) {
        std::vector<double> ys;
        for (const auto& pc : opt_costs) ys.push_back(pc.total_per_step);
        slope_opt = loglog_slope(dsizes, ys);
    }

    std::ostringstream out;
    out << "experiment,variant,elem,backend,d,f,n_arms,simd,steps,seed,alpha,lambda,noise_sigma,"
           "scalar_ops_per_step,vector_slots_per_step,total_per_step,speedup_vs_std,cost_slope_loglog"
        << (spec.time ? ",wall_time_s\n" : "\n");
    const std::string experiment = hybrid ? "hybrid" : "disjoint";
    for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
        const int dd = hybrid ? spec.d : spec.sizes[i];
        const int ff = hybrid ? spec.sizes[i] : 0;
        for (int pass = 0; pass < 2; ++pass) {
            const Variant v = pass == 0 ? Variant::standard : Variant::optimized;
            if ((v == Variant::standard && !want_std) || (v == Variant::optimized && !want_opt)) continue;
            const auto& pc = v == Variant::standard ? std_costs[i] : opt_costs[i];
            // std rows report 1; opt rows report the std/opt ratio (0 when
            // the standard run was not requested)
            double speedup = 1.0;
            if (v == Variant::optimized)
                speedup = want_std ? std_costs[i].total_per_step / pc.total_per_step : 0.0;
            std::vector<std::string> cells{
                experiment, variant_name(v), spec.elem, spec.backend,
                std::to_string(dd), std::to_string(ff), std::to_string(spec.n_arms),
                std::to_string(spec.simd), std::to_string(spec.steps), std::to_string(spec.seed),
                csv_double(spec.alpha), csv_double(spec.lambda), csv_double(spec.noise_sigma),
                csv_double(pc.scalar_per_step), csv_double(pc.slots_per_step),
                csv_double(pc.total_per_step),
                csv_double(speedup),
                csv_double(v == Variant::standard ? slope_std : slope_opt)};
            if (spec.time) cells.push_back(csv_double(pc.wall_s));
            out << csv_join(cells);
        }
    }
    return out.str();
}

// Paired-model run state snapshot used for reproducible resume of drift and
// correction runs.
template <class Model>
void save_run_state(const Model& opt, const Model& std_m, const DriftProbe& probe,
                    const std::string& path) {
    nlohmann::json j;
    j["format"] = "linucb-runstate";
    j["version"] = 1;
    j["optimized"] = to_json(opt);
    j["standard"] = to_json(std_m);
    j["cum_reward_opt"] = probe.cum_reward_opt;
    j["cum_reward_oracle"] = probe.cum_reward_oracle;
    j["decision_mismatches"] = probe.decision_mismatches;
    std::ofstream out(path);
    if (!out) throw NumericalError("cannot open run-state path: " + path);
    out << j.dump(2) << '\n';
}

namespace detail {

inline std::string drift_csv_header(bool time) {
    return std::string("experiment,d,f,n_arms,steps,seed,alpha,lambda,noise_sigma,sample_every,period,"
                       "step,matrix_id,frobenius_error,cum_reward_opt,cum_reward_oracle,mismatches_so_far") +
           (time ? ",wall_time_s\n" : "\n");
}

inline void append_drift_rows(std::ostringstream& out, const RunSpec& spec, const char* experiment,
                              std::int64_t period, const DriftProbe& probe, double wall_s) {
    for (const auto& s : probe.series) {
        std::vector<std::string> cells{
            experiment, std::to_string(spec.d), std::to_string(spec.f), std::to_string(spec.n_arms),
            std::to_string(spec.steps), std::to_string(spec.seed), csv_double(spec.alpha),
            csv_double(spec.lambda), csv_double(spec.noise_sigma), std::to_string(spec.sample_every),
            std::to_string(period), std::to_string(s.step), s.matrix_id,
            csv_double(s.frobenius_error), csv_double(s.cum_reward_opt),
            csv_double(s.cum_reward_oracle), std::to_string(s.mismatches)};
        if (spec.time) cells.push_back(csv_double(wall_s));
        out << csv_join(cells);
    }
}

}  // namespace detail

// Drift experiment (period = 0) and periodic-correction experiment
// (period = M > 0).  Runs float64 only; state snapshots allow resuming.
inline std::string run_drift(const RunSpec& spec, std::int64_t period, const std::string& load_state,
                             const std::string& save_state) {
    if (spec.elem != "f64") throw UsageError("drift experiments run on f64 only");
    BanditConfig cfg{spec.n_arms, spec.d, spec.f, spec.alpha, spec.lambda};
    EnvConfig ec{spec.n_arms, spec.d, spec.f, spec.noise_sigma, spec.seed};
    const SyntheticEnv env(ec);
    DriftProbe probe;
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream out;
    out << detail::drift_csv_header(spec.time);
    const char* experiment = period > 0 ? "correction" : "drift";
    if (spec.f > 0) {
        auto opt = HybridModel<double>::make(cfg, Variant::optimized);
        auto std_m = HybridModel<double>::make(cfg, Variant::standard);
        if (!load_state.empty()) {
            const auto j = load_snapshot(load_state);
            opt = hybrid_from_json<double>(j.at("optimized"));
            std_m = hybrid_from_json<double>(j.at("standard"));
            probe.cum_reward_opt = j.at("cum_reward_opt").get<double>();
            probe.cum_reward_oracle = j.at("cum_reward_oracle").get<double>();
            probe.decision_mismatches = j.at("decision_mismatches").get<std::int64_t>();
        }
        drift_advance_hybrid(opt, std_m, env, spec.steps, spec.sample_every, period, probe);
        if (!save_state.empty()) save_run_state(opt, std_m, probe, save_state);
    } else {
        auto opt = DisjointModel<double>::make(cfg, Variant::optimized);
        auto std_m = DisjointModel<double>::make(cfg, Variant::standard);
        if (!load_state.empty()) {
            const auto j = load_snapshot(load_state);
            opt = disjoint_from_json<double>(j.at("optimized"));
            std_m = disjoint_from_json<double>(j.at("standard"));
            probe.cum_reward_opt = j.at("cum_reward_opt").get<double>();
            probe.cum_reward_oracle = j.at("cum_reward_oracle").get<double>();
            probe.decision_mismatches = j.at("decision_mismatches").get<std::int64_t>();
        }
        drift_advance_disjoint(opt, std_m, env, spec.steps, spec.sample_every, period, probe);
        if (!save_state.empty()) save_run_state(opt, std_m, probe, save_state);
    }
    const double wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::append_drift_rows(out, spec, experiment, period, probe, wall_s);
    return out.str();
}

inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw NumericalError("cannot open output path: " + path);
    out << content;
}

}  // namespace linucb
