#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "linucb/csv.hpp"
#include "linucb/policies.hpp"

namespace linucb {

// splitmix64.  Chosen over std::mt19937_64 + std distributions because the
// standard distributions are implementation-defined; this stream is
// byte-reproducible everywhere.
struct SplitMix64 {
    std::uint64_t state = 0;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0,1)
    double uniform_sym() { return 2.0 * uniform01() - 1.0; }                      // [-1,1)

    double normal() {
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

namespace detail {

inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = seed;
    s = SplitMix64(s ^ tag).next();
    s = SplitMix64(s ^ a).next();
    s = SplitMix64(s ^ b).next();
    return s;
}

constexpr std::uint64_t kTagTheta = 0x7468657461ull;  // per-arm weights
constexpr std::uint64_t kTagBeta = 0x62657461ull;     // shared weights
constexpr std::uint64_t kTagCtx = 0x637478ull;        // contexts
constexpr std::uint64_t kTagCtxZ = 0x63747a5aull;     // hybrid z contexts
constexpr std::uint64_t kTagNoise = 0x6e6f697365ull;  // reward noise

inline std::vector<double> unit_uniform_vector(SplitMix64& rng, int len) {
    std::vector<double> v(len);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (int i = 0; i < len; ++i) {
            v[i] = rng.uniform_sym();
            norm += v[i] * v[i];
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-6);
    for (int i = 0; i < len; ++i) v[i] /= norm;
    return v;
}

inline std::vector<double> unit_sphere_vector(SplitMix64& rng, int len) {
    std::vector<double> v(len);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (int i = 0; i < len; ++i) {
            v[i] = rng.normal();
            norm += v[i] * v[i];
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-6);
    for (int i = 0; i < len; ++i) v[i] /= norm;
    return v;
}

}  // namespace detail

struct EnvConfig {
    int n_arms = 2;
    int d = 2;
    int f = 0;  // 0 = disjoint-only environment
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    // hidden weights; left empty they are drawn once per seed, uniform on
    // the unit sphere
    std::vector<std::vector<double>> theta_star;
    std::vector<double> beta_star;

    EnvConfig() = default;
    EnvConfig(int n_arms, int d, int f, double noise_sigma, std::uint64_t seed)
        : n_arms(n_arms), d(d), f(f), noise_sigma(noise_sigma), seed(seed) {}
};

// Deterministic linear-reward environment: every context and reward is a
// pure function of (seed, t, arm).  Contexts are i.i.d. uniform on [-1,1]
// entrywise, normalized to unit Euclidean norm; rewards are
// theta*^T x (+ z^T beta* when hybrid) plus Gaussian noise, clipped to [0,1].
class SyntheticEnv {
public:
    explicit SyntheticEnv(const EnvConfig& cfg) : cfg_(cfg) {
        if (cfg.n_arms < 1 || cfg.d < 1 || cfg.f < 0 || cfg.noise_sigma < 0.0)
            throw UsageError("synthetic env: bad config");
        if (!cfg.theta_star.empty()) {
            if (static_cast<int>(cfg.theta_star.size()) != cfg.n_arms)
                throw UsageError("synthetic env: theta_star needs one vector per arm");
            for (const auto& th : cfg.theta_star)
                if (static_cast<int>(th.size()) != cfg.d) throw UsageError("synthetic env: theta_star length != d");
            theta_star_ = cfg.theta_star;
        } else {
            for (int a = 0; a < cfg.n_arms; ++a) {
                SplitMix64 rng(detail::mix_key(cfg.seed, detail::kTagTheta, a, 0));
                theta_star_.push_back(detail::unit_sphere_vector(rng, cfg.d));
            }
        }
        if (cfg.f > 0) {
            if (!cfg.beta_star.empty()) {
                if (static_cast<int>(cfg.beta_star.size()) != cfg.d * cfg.f)
                    throw UsageError("synthetic env: beta_star length != d*f");
                beta_star_ = cfg.beta_star;
            } else {
                SplitMix64 rng(detail::mix_key(cfg.seed, detail::kTagBeta, 0, 0));
                beta_star_ = detail::unit_sphere_vector(rng, cfg.d * cfg.f);
            }
        }
    }

    const EnvConfig& config() const { return cfg_; }
    bool hybrid() const { return cfg_.f > 0; }
    int k() const { return cfg_.d * cfg_.f; }
    const std::vector<std::vector<double>>& theta_star() const { return theta_star_; }
    const std::vector<double>& beta_star() const { return beta_star_; }

    Vector<double> context_x(std::int64_t t, int arm) const {
        check_query(t, arm);
        SplitMix64 rng(detail::mix_key(cfg_.seed, detail::kTagCtx, static_cast<std::uint64_t>(t), arm));
        return Vector<double>(detail::unit_uniform_vector(rng, cfg_.d));
    }

    Vector<double> context_z(std::int64_t t, int arm) const {
        check_query(t, arm);
        SplitMix64 rng(detail::mix_key(cfg_.seed, detail::kTagCtxZ, static_cast<std::uint64_t>(t), arm));
        return Vector<double>(detail::unit_uniform_vector(rng, k()));
    }

    std::vector<Vector<double>> disjoint_contexts(std::int64_t t) const {
        std::vector<Vector<double>> out;
        out.reserve(cfg_.n_arms);
        for (int a = 0; a < cfg_.n_arms; ++a) out.push_back(context_x(t, a));
        return out;
    }

    std::vector<HybridContext<double>> hybrid_contexts(std::int64_t t) const {
        std::vector<HybridContext<double>> out;
        out.reserve(cfg_.n_arms);
        for (int a = 0; a < cfg_.n_arms; ++a) out.push_back({context_z(t, a), context_x(t, a)});
        return out;
    }

    // r = theta*_a^T x (+ z^T beta* when hybrid) + noise, clipped to [0,1];
    // the noise draw is a pure function of (seed, t, arm).
    double reward(std::int64_t t, int arm, const Vector<double>& x) const {
        check_query(t, arm);
        double r = 0.0;
        for (int i = 0; i < cfg_.d; ++i) r += theta_star_[arm][i] * x[i];
        return finish_reward(t, arm, r);
    }

    double reward(std::int64_t t, int arm, const Vector<double>& x, const Vector<double>& z) const {
        check_query(t, arm);
        double r = 0.0;
        for (int i = 0; i < cfg_.d; ++i) r += theta_star_[arm][i] * x[i];
        for (int i = 0; i < k(); ++i) r += beta_star_[i] * z[i];
        return finish_reward(t, arm, r);
    }

    double reward(std::int64_t t, int arm) const {
        return hybrid() ? reward(t, arm, context_x(t, arm), context_z(t, arm))
                        : reward(t, arm, context_x(t, arm));
    }

private:
    void check_query(std::int64_t t, int arm) const {
        if (t < 1) throw UsageError("synthetic env: steps are indexed from 1");
        if (arm < 0 || arm >= cfg_.n_arms) throw DimensionError("synthetic env: arm out of range");
    }

    double finish_reward(std::int64_t t, int arm, double r) const {
        if (cfg_.noise_sigma > 0.0) {
            SplitMix64 rng(detail::mix_key(cfg_.seed, detail::kTagNoise, static_cast<std::uint64_t>(t), arm));
            r += cfg_.noise_sigma * rng.normal();
        }
        return r < 0.0 ? 0.0 : (r > 1.0 ? 1.0 : r);
    }

    EnvConfig cfg_;
    std::vector<std::vector<double>> theta_star_;
    std::vector<double> beta_star_;
};

// Replay environment: serves contexts and rewards recorded in a CSV trace
// with header t,arm,x0..x{d-1}[,z0..z{k-1}],r so external datasets can drive
// the same experiments.
class TraceEnv {
public:
    TraceEnv(int n_arms, int d, int f, const std::string& path) : n_arms_(n_arms), f_(f) {
        const auto rows = csv_read_file(path);
        if (rows.empty()) throw NumericalError("trace is empty: " + path);
        const int k = d * f;
        const std::size_t expect = 2 + static_cast<std::size_t>(d) + static_cast<std::size_t>(k) + 1;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() != expect)
                throw NumericalError("trace row has " + std::to_string(row.size()) + " columns, expected " +
                                     std::to_string(expect));
            const std::int64_t t = std::stoll(row[0]);
            const int arm = std::stoi(row[1]);
            Record rec;
            rec.x.resize(d);
            for (int i = 0; i < d; ++i) rec.x[i] = std::stod(row[2 + i]);
            rec.z.resize(k);
            for (int i = 0; i < k; ++i) rec.z[i] = std::stod(row[2 + d + i]);
            rec.r = std::stod(row.back());
            records_[{t, arm}] = std::move(rec);
            if (t > max_t_) max_t_ = t;
        }
    }

    static std::vector<std::string> header(int d, int f) {
        std::vector<std::string> h{"t", "arm"};
        for (int i = 0; i < d; ++i) h.push_back("x" + std::to_string(i));
        for (int i = 0; i < d * f; ++i) h.push_back("z" + std::to_string(i));
        h.push_back("r");
        return h;
    }

    // Dump a synthetic environment to a replayable trace.
    static void record(const SyntheticEnv& env, std::int64_t steps, const std::string& path) {
        std::ofstream out(path);
        const auto& cfg = env.config();
        out << csv_join(header(cfg.d, cfg.f));
        for (std::int64_t t = 1; t <= steps; ++t) {
            for (int a = 0; a < cfg.n_arms; ++a) {
                std::vector<std::string> cells{std::to_string(t), std::to_string(a)};
                const auto x = env.context_x(t, a);
                for (int i = 0; i < cfg.d; ++i) cells.push_back(csv_double(x[i]));
                if (cfg.f > 0) {
                    const auto z = env.context_z(t, a);
                    for (int i = 0; i < env.k(); ++i) cells.push_back(csv_double(z[i]));
                }
                cells.push_back(csv_double(env.reward(t, a)));
                out << csv_join(cells);
            }
        }
    }

    bool hybrid() const { return f_ > 0; }
    std::int64_t max_t() const { return max_t_; }

    Vector<double> context_x(std::int64_t t, int arm) const { return Vector<double>(at(t, arm).x); }
    Vector<double> context_z(std::int64_t t, int arm) const { return Vector<double>(at(t, arm).z); }

    std::vector<Vector<double>> disjoint_contexts(std::int64_t t) const {
        std::vector<Vector<double>> out;
        for (int a = 0; a < n_arms_; ++a) out.push_back(context_x(t, a));
        return out;
    }

    std::vector<HybridContext<double>> hybrid_contexts(std::int64_t t) const {
        std::vector<HybridContext<double>> out;
        for (int a = 0; a < n_arms_; ++a) out.push_back({context_z(t, a), context_x(t, a)});
        return out;
    }

    double reward(std::int64_t t, int arm) const { return at(t, arm).r; }

private:
    struct Record {
        std::vector<double> x, z;
        double r = 0.0;
    };

    const Record& at(std::int64_t t, int arm) const {
        const auto it = records_.find({t, arm});
        if (it == records_.end())
            throw NumericalError("trace has no record for arm " + std::to_string(arm), t);
        return it->second;
    }

    int n_arms_, f_;
    std::int64_t max_t_ = 0;
    std::map<std::pair<std::int64_t, int>, Record> records_;
};

}  // namespace linucb
