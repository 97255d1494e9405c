#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "linucb/csv.hpp"
#include "linucb/policies.hpp"

namespace linucb {

// Cholesky factorization attempt; the working definition of positive
// definite throughout the suite.
inline bool cholesky_ok(const Matrix<double>& m) {
    if (m.rows() != m.cols()) return false;
    const int n = m.rows();
    Matrix<double> L(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = m(i, j);
            for (int l = 0; l < j; ++l) sum -= L(i, l) * L(j, l);
            if (i == j) {
                if (!(sum > 0.0)) return false;
                L(i, i) = std::sqrt(sum);
            } else {
                L(i, j) = sum / L(j, j);
            }
        }
    }
    return true;
}

// true iff square, symmetric within 1e-9 entrywise, and Cholesky succeeds.
inline bool check_spd(const Matrix<double>& m) {
    if (m.rows() != m.cols()) return false;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j)
            if (std::fabs(m(i, j) - m(j, i)) > 1e-9) return false;
    return cholesky_ok(m);
}

template <class T>
bool check_spd(const Matrix<T>& m) {
    return check_spd(convert<double>(m));
}

struct DriftSample {
    std::int64_t step = 0;
    std::string matrix_id;
    double frobenius_error = 0.0;
    double cum_reward_opt = 0.0;
    double cum_reward_oracle = 0.0;
    std::int64_t mismatches = 0;
};

// Frobenius-error series of incrementally maintained inverses against the
// freshly inverted direct matrices, over one shared decision stream.
struct DriftProbe {
    std::int64_t steps = 0;
    std::int64_t sample_every = 1;
    std::int64_t decision_mismatches = 0;
    double cum_reward_opt = 0.0;
    double cum_reward_oracle = 0.0;
    std::vector<DriftSample> series;

    double max_error(const std::string& matrix_id) const {
        double m = 0.0;
        for (const auto& s : series)
            if (s.matrix_id == matrix_id) m = std::max(m, s.frobenius_error);
        return m;
    }

    double max_error() const {
        double m = 0.0;
        for (const auto& s : series) m = std::max(m, s.frobenius_error);
        return m;
    }
};

inline void write_drift_csv(const DriftProbe& p, std::ostream& out) {
    out << "step,matrix_id,frobenius_error,cum_reward_opt,cum_reward_oracle\n";
    for (const auto& s : p.series) {
        out << s.step << ',' << s.matrix_id << ',' << csv_double(s.frobenius_error) << ','
            << csv_double(s.cum_reward_opt) << ',' << csv_double(s.cum_reward_oracle) << '\n';
    }
}

namespace detail {

inline void push_arm_errors(DriftProbe& probe, std::int64_t t, int selected,
                            const std::vector<double>& errs) {
    double mx = 0.0, mean = 0.0;
    for (double e : errs) {
        mx = std::max(mx, e);
        mean += e;
    }
    mean /= static_cast<double>(errs.size());
    probe.series.push_back({t, "A_inv_selected", errs[selected], probe.cum_reward_opt,
                            probe.cum_reward_oracle, probe.decision_mismatches});
    probe.series.push_back(
        {t, "A_inv_max", mx, probe.cum_reward_opt, probe.cum_reward_oracle, probe.decision_mismatches});
    probe.series.push_back(
        {t, "A_inv_mean", mean, probe.cum_reward_opt, probe.cum_reward_oracle, probe.decision_mismatches});
}

}  // namespace detail

// Lockstep engine behind drift_run: advances the paired models from their
// current step up to t_end.  Both models receive byte-identical contexts and
// rewards and see the optimized model's chosen action, so any error series
// is attributable solely to the update arithmetic; the standard model's own
// choices still feed the mismatch count and the oracle reward track.
// period > 0 overwrites the stored inverses with exact inverses of the
// standard model's direct matrices every period steps.
template <class Env>
void drift_advance_disjoint(DisjointModel<double>& opt, DisjointModel<double>& std_m, const Env& env,
                            std::int64_t t_end, std::int64_t sample_every, std::int64_t period,
                            DriftProbe& probe) {
    if (sample_every < 1) throw UsageError("drift run: sample_every must be >= 1");
    if (opt.t != std_m.t) throw UsageError("drift run: paired models are out of step");
    const Backend be = Backend::scalar();
    OpCounter scratch;
    const BanditConfig& cfg = opt.cfg;
    for (std::int64_t t = opt.t + 1; t <= t_end; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        const Decision dec_opt = disjoint_select(opt, ctxs, be, scratch);
        const Decision dec_std = disjoint_select(std_m, ctxs, be, scratch);
        if (dec_opt.chosen_arm != dec_std.chosen_arm) ++probe.decision_mismatches;
        const int arm = dec_opt.chosen_arm;
        const double r = env.reward(t, arm);
        probe.cum_reward_opt += r;
        probe.cum_reward_oracle += env.reward(t, dec_std.chosen_arm);
        disjoint_update_optimized(opt, arm, ctxs[arm], r, be, scratch);
        disjoint_update_standard(std_m, arm, ctxs[arm], r, be, scratch);
        if (period > 0 && t % period == 0)
            for (int a = 0; a < cfg.n_arms; ++a) opt.A[a] = lu_invert(std_m.A[a], be, scratch);
        if (t % sample_every == 0 || t == t_end) {
            std::vector<double> errs(cfg.n_arms);
            for (int a = 0; a < cfg.n_arms; ++a)
                errs[a] = frobenius_diff(opt.A[a], lu_invert(std_m.A[a], be, scratch));
            detail::push_arm_errors(probe, t, arm, errs);
        }
    }
    probe.steps = t_end;
    probe.sample_every = sample_every;
}

template <class Env>
void drift_advance_hybrid(HybridModel<double>& opt, HybridModel<double>& std_m, const Env& env,
                          std::int64_t t_end, std::int64_t sample_every, std::int64_t period,
                          DriftProbe& probe) {
    if (sample_every < 1) throw UsageError("drift run: sample_every must be >= 1");
    if (opt.t != std_m.t) throw UsageError("drift run: paired models are out of step");
    const Backend be = Backend::scalar();
    OpCounter scratch;
    const BanditConfig& cfg = opt.cfg;
    for (std::int64_t t = opt.t + 1; t <= t_end; ++t) {
        const auto ctxs = env.hybrid_contexts(t);
        const Decision dec_opt = hybrid_select(opt, ctxs, be, scratch);
        const Decision dec_std = hybrid_select(std_m, ctxs, be, scratch);
        if (dec_opt.chosen_arm != dec_std.chosen_arm) ++probe.decision_mismatches;
        const int arm = dec_opt.chosen_arm;
        const double r = env.reward(t, arm);
        probe.cum_reward_opt += r;
        probe.cum_reward_oracle += env.reward(t, dec_std.chosen_arm);
        hybrid_update_optimized(opt, arm, ctxs[arm].z, ctxs[arm].x, r, be, scratch);
        hybrid_update_standard(std_m, arm, ctxs[arm].z, ctxs[arm].x, r, be, scratch);
        if (period > 0 && t % period == 0) {
            opt.A0 = lu_invert(std_m.A0, be, scratch);
            for (int a = 0; a < cfg.n_arms; ++a) opt.A[a] = lu_invert(std_m.A[a], be, scratch);
        }
        if (t % sample_every == 0 || t == t_end) {
            probe.series.push_back({t, "A0_inv", frobenius_diff(opt.A0, lu_invert(std_m.A0, be, scratch)),
                                    probe.cum_reward_opt, probe.cum_reward_oracle,
                                    probe.decision_mismatches});
            std::vector<double> errs(cfg.n_arms);
            for (int a = 0; a < cfg.n_arms; ++a)
                errs[a] = frobenius_diff(opt.A[a], lu_invert(std_m.A[a], be, scratch));
            detail::push_arm_errors(probe, t, arm, errs);
        }
    }
    probe.steps = t_end;
    probe.sample_every = sample_every;
}

template <class Env>
DriftProbe drift_run_disjoint(const BanditConfig& cfg, const Env& env, std::int64_t steps,
                              std::int64_t sample_every, std::int64_t period = 0) {
    if (steps < 1) throw UsageError("drift run: steps must be >= 1");
    auto opt = DisjointModel<double>::make(cfg, Variant::optimized);
    auto std_m = DisjointModel<double>::make(cfg, Variant::standard);
    DriftProbe probe;
    drift_advance_disjoint(opt, std_m, env, steps, sample_every, period, probe);
    return probe;
}

template <class Env>
DriftProbe drift_run_hybrid(const BanditConfig& cfg, const Env& env, std::int64_t steps,
                            std::int64_t sample_every, std::int64_t period = 0) {
    if (steps < 1) throw UsageError("drift run: steps must be >= 1");
    auto opt = HybridModel<double>::make(cfg, Variant::optimized);
    auto std_m = HybridModel<double>::make(cfg, Variant::standard);
    DriftProbe probe;
    drift_advance_hybrid(opt, std_m, env, steps, sample_every, period, probe);
    return probe;
}

// Periodic-correction wrapper: an optimized model for selection plus shadow
// direct matrices kept current with the standard update rules.  Every
// `period` steps the stored inverses are replaced by exact inverses of the
// shadow matrices.
template <class T>
struct CorrectedDisjoint {
    DisjointModel<T> inner;   // optimized
    DisjointModel<T> shadow;  // standard-rule direct matrices
    std::int64_t period = 1;

    static CorrectedDisjoint make(const BanditConfig& cfg, std::int64_t period) {
        if (period < 1) throw UsageError("corrected policy: period must be >= 1");
        return {DisjointModel<T>::make(cfg, Variant::optimized),
                DisjointModel<T>::make(cfg, Variant::standard), period};
    }
};

template <class T>
struct CorrectedHybrid {
    HybridModel<T> inner;
    HybridModel<T> shadow;
    std::int64_t period = 1;

    static CorrectedHybrid make(const BanditConfig& cfg, std::int64_t period) {
        if (period < 1) throw UsageError("corrected policy: period must be >= 1");
        return {HybridModel<T>::make(cfg, Variant::optimized),
                HybridModel<T>::make(cfg, Variant::standard), period};
    }
};

template <class T>
void apply_correction(CorrectedDisjoint<T>& p, const Backend& be, OpCounter& c) {
    for (std::size_t a = 0; a < p.shadow.A.size(); ++a) p.inner.A[a] = lu_invert(p.shadow.A[a], be, c);
}

template <class T>
void apply_correction(CorrectedHybrid<T>& p, const Backend& be, OpCounter& c) {
    p.inner.A0 = lu_invert(p.shadow.A0, be, c);
    for (std::size_t a = 0; a < p.shadow.A.size(); ++a) p.inner.A[a] = lu_invert(p.shadow.A[a], be, c);
}

template <class T, class RewardFn>
std::pair<Decision, double> corrected_step(CorrectedDisjoint<T>& p, const std::vector<Vector<T>>& ctxs,
                                           RewardFn&& reward_fn, const Backend& be, OpCounter& c) {
    Decision dec = disjoint_select(p.inner, ctxs, be, c);
    const double r = reward_fn(dec.chosen_arm);
    disjoint_update_optimized(p.inner, dec.chosen_arm, ctxs[dec.chosen_arm], r, be, c);
    disjoint_update_standard(p.shadow, dec.chosen_arm, ctxs[dec.chosen_arm], r, be, c);
    if (p.inner.t % p.period == 0) apply_correction(p, be, c);
    return {std::move(dec), r};
}

template <class T, class RewardFn>
std::pair<Decision, double> corrected_step(CorrectedHybrid<T>& p, const std::vector<HybridContext<T>>& ctxs,
                                           RewardFn&& reward_fn, const Backend& be, OpCounter& c) {
    Decision dec = hybrid_select(p.inner, ctxs, be, c);
    const double r = reward_fn(dec.chosen_arm);
    const auto& ctx = ctxs[dec.chosen_arm];
    hybrid_update_optimized(p.inner, dec.chosen_arm, ctx.z, ctx.x, r, be, c);
    hybrid_update_standard(p.shadow, dec.chosen_arm, ctx.z, ctx.x, r, be, c);
    if (p.inner.t % p.period == 0) apply_correction(p, be, c);
    return {std::move(dec), r};
}

// Lockstep fidelity probe for the fixed-point port: a float64 disjoint
// optimized model drives the decision stream; a fixed-point twin sees the
// same actions on quantized contexts.  Returns the per-step agreement count
// between the fixed model's would-be choice and the float64 choice.
template <class T, class Env>
std::int64_t fixed_lockstep_agreement(const BanditConfig& cfg, const Env& env, std::int64_t steps) {
    auto mf = DisjointModel<double>::make(cfg, Variant::optimized);
    auto mq = DisjointModel<T>::make(cfg, Variant::optimized);
    const Backend be = Backend::scalar();
    OpCounter c;
    std::int64_t agree = 0;
    for (std::int64_t t = 1; t <= steps; ++t) {
        const auto ctxs = env.disjoint_contexts(t);
        std::vector<Vector<T>> qctxs;
        qctxs.reserve(ctxs.size());
        for (const auto& x : ctxs) qctxs.push_back(convert<T>(x));
        const Decision df = disjoint_select(mf, ctxs, be, c);
        const Decision dq = disjoint_select(mq, qctxs, be, c);
        if (df.chosen_arm == dq.chosen_arm) ++agree;
        const int arm = df.chosen_arm;
        const double r = env.reward(t, arm);
        disjoint_update_optimized(mf, arm, ctxs[arm], r, be, c);
        disjoint_update_optimized(mq, arm, qctxs[arm], r, be, c);
    }
    return agree;
}

}  // namespace linucb
