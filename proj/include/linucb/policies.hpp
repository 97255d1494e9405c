#pragma once

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "linucb/kernels.hpp"

namespace linucb {

enum class Variant { standard, optimized };

inline const char* variant_name(Variant v) { return v == Variant::standard ? "std" : "opt"; }

struct BanditConfig {
    int n_arms = 1;
    int d = 1;
    int f = 0;  // arm-feature length; 0 selects the disjoint family, k = d*f otherwise
    double alpha = 1.0;
    double lambda = 1.0;

    int k() const { return d * f; }

    void validate(bool hybrid) const {
        if (n_arms < 1 || d < 1) throw UsageError("bandit config: n_arms and d must be >= 1");
        if (hybrid && f < 1) throw UsageError("bandit config: hybrid requires f >= 1");
        if (!(alpha >= 0.0)) throw UsageError("bandit config: alpha must be >= 0");
        if (!(lambda > 0.0)) throw UsageError("bandit config: lambda must be > 0");
    }
};

struct Decision {
    int chosen_arm = 0;
    std::vector<double> scores;      // p_{t,a}
    std::vector<double> confidence;  // x^T A^-1 x (disjoint) or s_{t,a} (hybrid)
};

namespace detail {

// argmax with lowest-index tie-break, evaluated in the element domain so
// fixed-point scores are compared exactly on raw values.
template <class T>
int argmax_lowest(const std::vector<T>& vals) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(vals.size()); ++i)
        if (vals[i] > vals[best]) best = i;
    return best;
}

template <class T>
T clamp_nonneg(T v) {
    return v < ElemOps<T>::zero() ? ElemOps<T>::zero() : v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Disjoint LinearUCB
// ---------------------------------------------------------------------------

template <class T>
struct DisjointModel {
    BanditConfig cfg;
    Variant variant = Variant::standard;
    std::vector<Matrix<T>> A;  // standard: A_a; optimized: A_a^-1, stored directly
    std::vector<Vector<T>> b;
    std::int64_t t = 0;
    double last_denominator = 0.0;  // most recent SM denominator (optimized)

    static DisjointModel make(const BanditConfig& cfg, Variant variant) {
        cfg.validate(false);
        DisjointModel m;
        m.cfg = cfg;
        m.variant = variant;
        const T lam = ElemOps<T>::from_double(cfg.lambda);
        const T diag = variant == Variant::standard ? lam : ElemOps<T>::one() / lam;
        m.A.assign(cfg.n_arms, Matrix<T>::scaled_identity(cfg.d, diag));
        m.b.assign(cfg.n_arms, Vector<T>(cfg.d));
        return m;
    }
};

// p = theta^T x + alpha * sqrt(x^T A^-1 x) given an inverse, shared by both
// variants so their scores differ only through the inverse itself.
template <class T>
std::pair<T, T> disjoint_score(const Matrix<T>& a_inv, const Vector<T>& b, const Vector<T>& x,
                               T alpha, const Backend& be, OpCounter& c) {
    const Vector<T> theta = mat_vec(a_inv, b, be, c);
    const Vector<T> w = mat_vec(a_inv, x, be, c);
    const T quad = dot(x, w, c);
    c.charge_scalar(KernelKind::policy, 3);  // sqrt, scale, add
    const T p = dot(x, theta, c) + alpha * ElemOps<T>::sqrt(detail::clamp_nonneg(quad));
    return {p, quad};
}

template <class T>
Decision disjoint_select(const DisjointModel<T>& m, const std::vector<Vector<T>>& contexts,
                         const Backend& be, OpCounter& c) {
    detail::require(static_cast<int>(contexts.size()) == m.cfg.n_arms, "disjoint_select: one context per arm");
    const T alpha = ElemOps<T>::from_double(m.cfg.alpha);
    std::vector<T> p(m.cfg.n_arms);
    Decision dec;
    dec.scores.resize(m.cfg.n_arms);
    dec.confidence.resize(m.cfg.n_arms);
    for (int a = 0; a < m.cfg.n_arms; ++a) {
        detail::require(contexts[a].len() == m.cfg.d, "disjoint_select: context length != d");
        // the standard variant pays for a fresh inversion once per arm per call
        const Matrix<T> a_inv = m.variant == Variant::standard ? lu_invert(m.A[a], be, c) : m.A[a];
        const auto [score, quad] = disjoint_score(a_inv, m.b[a], contexts[a], alpha, be, c);
        p[a] = score;
        dec.scores[a] = ElemOps<T>::to_double(score);
        dec.confidence[a] = ElemOps<T>::to_double(quad);
    }
    dec.chosen_arm = detail::argmax_lowest(p);
    return dec;
}

template <class T>
void disjoint_update_standard(DisjointModel<T>& m, int arm, const Vector<T>& x, double r,
                              const Backend& be, OpCounter& c) {
    if (m.variant != Variant::standard) throw UsageError("disjoint_update_standard: model is optimized");
    detail::require(arm >= 0 && arm < m.cfg.n_arms, "disjoint_update_standard: arm out of range");
    m.A[arm] = mat_add(m.A[arm], outer(x, x, c), be, c);
    axpy(ElemOps<T>::from_double(r), x, m.b[arm], c);
    ++m.t;
}

// Sherman-Morrison rank-one update of the stored inverse.
template <class T>
void disjoint_update_optimized(DisjointModel<T>& m, int arm, const Vector<T>& x, double r,
                               const Backend& be, OpCounter& c) {
    if (m.variant != Variant::optimized) throw UsageError("disjoint_update_optimized: model is standard");
    detail::require(arm >= 0 && arm < m.cfg.n_arms, "disjoint_update_optimized: arm out of range");
    const Vector<T> w = mat_vec(m.A[arm], x, be, c);
    const T q = dot(x, w, c);
    c.charge_scalar(KernelKind::policy, 1);
    const T den = ElemOps<T>::one() + q;
    m.last_denominator = ElemOps<T>::to_double(den);
    assert(m.last_denominator >= 1.0);
    const Vector<T> u = vec_div_scalar(w, den, c);
    m.A[arm] = mat_sub(m.A[arm], outer(w, u, c), be, c);
    axpy(ElemOps<T>::from_double(r), x, m.b[arm], c);
    ++m.t;
}

template <class T>
void disjoint_update(DisjointModel<T>& m, int arm, const Vector<T>& x, double r, const Backend& be,
                     OpCounter& c) {
    if (m.variant == Variant::standard)
        disjoint_update_standard(m, arm, x, r, be, c);
    else
        disjoint_update_optimized(m, arm, x, r, be, c);
}

// ---------------------------------------------------------------------------
// Hybrid LinearUCB
// ---------------------------------------------------------------------------

template <class T>
struct HybridContext {
    Vector<T> z;  // k shared features
    Vector<T> x;  // d arm features
};

template <class T>
struct HybridModel {
    BanditConfig cfg;
    Variant variant = Variant::standard;
    Matrix<T> A0;  // standard: A0; optimized: A0^-1 (k x k)
    Vector<T> b0;  // k
    std::vector<Matrix<T>> A;  // d x d per arm (direct or inverse per variant)
    std::vector<Matrix<T>> B;  // d x k per arm
    std::vector<Vector<T>> b;  // d per arm
    std::int64_t t = 0;
    double last_denominator_arm = 0.0;
    double last_denominator_shared = 0.0;

    static HybridModel make(const BanditConfig& cfg, Variant variant) {
        cfg.validate(true);
        HybridModel m;
        m.cfg = cfg;
        m.variant = variant;
        const T lam = ElemOps<T>::from_double(cfg.lambda);
        const T diag = variant == Variant::standard ? lam : ElemOps<T>::one() / lam;
        m.A0 = Matrix<T>::scaled_identity(cfg.k(), diag);
        m.b0 = Vector<T>(cfg.k());
        m.A.assign(cfg.n_arms, Matrix<T>::scaled_identity(cfg.d, diag));
        m.B.assign(cfg.n_arms, Matrix<T>(cfg.d, cfg.k()));
        m.b.assign(cfg.n_arms, Vector<T>(cfg.d));
        return m;
    }
};

// Four-term confidence width plus score for one arm, given both inverses.
// Shared between the standard and optimized variants.
template <class T>
std::pair<T, T> hybrid_score(const Matrix<T>& a0_inv, const Vector<T>& beta_hat,
                             const Matrix<T>& a_inv, const Matrix<T>& B, const Vector<T>& b,
                             const Vector<T>& z, const Vector<T>& x, T alpha, const Backend& be,
                             OpCounter& c) {
    const Vector<T> theta = mat_vec(a_inv, vec_sub(b, mat_vec(B, beta_hat, be, c), c), be, c);
    const Vector<T> w = mat_vec(a_inv, x, be, c);
    const T t3 = dot(x, w, c);
    const Vector<T> u = mat_vec(transpose(B), w, be, c);
    const Vector<T> g = mat_vec(a0_inv, z, be, c);
    const Vector<T> v = mat_vec(a0_inv, u, be, c);
    const T t1 = dot(z, g, c);
    const T t2 = dot(z, v, c);
    const T t4 = dot(u, v, c);
    c.charge_scalar(KernelKind::policy, 8);
    const T two = ElemOps<T>::from_double(2.0);
    const T s = t1 - two * t2 + t3 + t4;
    const T p = dot(z, beta_hat, c) + dot(x, theta, c) + alpha * ElemOps<T>::sqrt(detail::clamp_nonneg(s));
    return {p, s};
}

template <class T>
Decision hybrid_select(const HybridModel<T>& m, const std::vector<HybridContext<T>>& contexts,
                       const Backend& be, OpCounter& c) {
    detail::require(static_cast<int>(contexts.size()) == m.cfg.n_arms, "hybrid_select: one context per arm");
    const T alpha = ElemOps<T>::from_double(m.cfg.alpha);
    // inverted once per call in the standard variant, read directly otherwise
    const Matrix<T> a0_inv = m.variant == Variant::standard ? lu_invert(m.A0, be, c) : m.A0;
    const Vector<T> beta_hat = mat_vec(a0_inv, m.b0, be, c);
    std::vector<T> p(m.cfg.n_arms);
    Decision dec;
    dec.scores.resize(m.cfg.n_arms);
    dec.confidence.resize(m.cfg.n_arms);
    for (int a = 0; a < m.cfg.n_arms; ++a) {
        detail::require(contexts[a].z.len() == m.cfg.k() && contexts[a].x.len() == m.cfg.d,
                        "hybrid_select: context shape mismatch");
        const Matrix<T> a_inv = m.variant == Variant::standard ? lu_invert(m.A[a], be, c) : m.A[a];
        const auto [score, s] = hybrid_score(a0_inv, beta_hat, a_inv, m.B[a], m.b[a], contexts[a].z,
                                             contexts[a].x, alpha, be, c);
        p[a] = score;
        dec.scores[a] = ElemOps<T>::to_double(score);
        dec.confidence[a] = ElemOps<T>::to_double(s);
    }
    dec.chosen_arm = detail::argmax_lowest(p);
    return dec;
}

// Shared-state bookkeeping in the original update order: fold the selected
// arm's old contribution into (A0, b0), apply the rank-one per-arm updates,
// then fold the new contribution back.
template <class T>
void hybrid_update_standard(HybridModel<T>& m, int arm, const Vector<T>& z, const Vector<T>& x,
                            double r, const Backend& be, OpCounter& c) {
    if (m.variant != Variant::standard) throw UsageError("hybrid_update_standard: model is optimized");
    detail::require(arm >= 0 && arm < m.cfg.n_arms, "hybrid_update_standard: arm out of range");
    const T rr = ElemOps<T>::from_double(r);

    // pre-update per-arm state
    {
        const Matrix<T> a_inv = lu_invert(m.A[arm], be, c);
        const Matrix<T> M = mat_mul(transpose(m.B[arm]), a_inv, be, c);  // k x d
        m.A0 = mat_add(m.A0, mat_mul(M, m.B[arm], be, c), be, c);
        m.b0 = vec_add(m.b0, mat_vec(M, m.b[arm], be, c), c);
    }
    // rank-one per-arm updates
    m.A[arm] = mat_add(m.A[arm], outer(x, x, c), be, c);
    m.B[arm] = mat_add(m.B[arm], outer(x, z, c), be, c);
    axpy(rr, x, m.b[arm], c);
    // post-update per-arm state
    {
        const Matrix<T> a_inv = lu_invert(m.A[arm], be, c);
        const Matrix<T> M = mat_mul(transpose(m.B[arm]), a_inv, be, c);
        m.A0 = mat_sub(mat_add(m.A0, outer(z, z, c), be, c), mat_mul(M, m.B[arm], be, c), be, c);
        m.b0 = vec_sub(vec_add(m.b0, vec_scale(rr, z, c), c), mat_vec(M, m.b[arm], be, c), c);
    }
    ++m.t;
}

namespace detail {

// A0^-1 <- A0^-1 -/+ A0^-1 B^T (inner)^-1 B A0^-1 with inner = A_dir +/- B A0^-1 B^T.
// One d x d inversion; G = B * A0^-1 is reused for both sides of the sandwich.
template <class T>
Matrix<T> woodbury_sandwich(const Matrix<T>& a0_inv, const Matrix<T>& B, const Matrix<T>& a_dir,
                            bool add_perturbation, const Backend& be, OpCounter& c) {
    const Matrix<T> G = mat_mul(B, a0_inv, be, c);                  // d x k
    const Matrix<T> C = mat_mul(G, transpose(B), be, c);            // d x d
    const Matrix<T> inner = add_perturbation ? mat_add(a_dir, C, be, c) : mat_sub(a_dir, C, be, c);
    const Matrix<T> W = lu_invert(inner, be, c);
    const Matrix<T> H = mat_mul(W, G, be, c);                       // d x k
    const Matrix<T> S = mat_mul(transpose(G), H, be, c);            // k x k
    return add_perturbation ? mat_sub(a0_inv, S, be, c) : mat_add(a0_inv, S, be, c);
}

}  // namespace detail

// Incremental update of the stored inverses (Sherman-Morrison for the
// rank-one parts, Woodbury for the B^T A^-1 B parts).  Exactly three d x d
// inversions per call: recovering the direct per-arm matrix plus the two
// Woodbury inner inversions.
template <class T>
void hybrid_update_optimized(HybridModel<T>& m, int arm, const Vector<T>& z, const Vector<T>& x,
                             double r, const Backend& be, OpCounter& c) {
    if (m.variant != Variant::optimized) throw UsageError("hybrid_update_optimized: model is standard");
    detail::require(arm >= 0 && arm < m.cfg.n_arms, "hybrid_update_optimized: arm out of range");
    const T rr = ElemOps<T>::from_double(r);
    const T one = ElemOps<T>::one();

    // the direct matrix is recovered by inverting the stored inverse
    Matrix<T> a_dir(m.cfg.d, m.cfg.d);
    try {
        a_dir = lu_invert(m.A[arm], be, c);
        // fold the old B^T A^-1 B contribution into A0^-1
        m.A0 = detail::woodbury_sandwich(m.A0, m.B[arm], a_dir, /*add=*/true, be, c);
    } catch (const SingularMatrixError& e) {
        throw NumericalError(std::string("hybrid optimized update: ") + e.what(), m.t + 1);
    }
    m.b0 = vec_add(m.b0, mat_vec(transpose(m.B[arm]), mat_vec(m.A[arm], m.b[arm], be, c), be, c), c);

    // Sherman-Morrison on the per-arm inverse
    {
        const Vector<T> w = mat_vec(m.A[arm], x, be, c);
        const T q = dot(x, w, c);
        c.charge_scalar(KernelKind::policy, 1);
        const T den = one + q;
        m.last_denominator_arm = ElemOps<T>::to_double(den);
        assert(m.last_denominator_arm >= 1.0);
        m.A[arm] = mat_sub(m.A[arm], outer(w, vec_div_scalar(w, den, c), c), be, c);
    }
    m.B[arm] = mat_add(m.B[arm], outer(x, z, c), be, c);
    axpy(rr, x, m.b[arm], c);

    // Sherman-Morrison on the shared inverse with z
    {
        const Vector<T> g = mat_vec(m.A0, z, be, c);
        const T q = dot(z, g, c);
        c.charge_scalar(KernelKind::policy, 1);
        const T den = one + q;
        m.last_denominator_shared = ElemOps<T>::to_double(den);
        assert(m.last_denominator_shared >= 1.0);
        m.A0 = mat_sub(m.A0, outer(g, vec_div_scalar(g, den, c), c), be, c);
    }

    // fold the new contribution back out, with post-update per-arm state
    const Matrix<T> a_dir_post = mat_add(a_dir, outer(x, x, c), be, c);
    try {
        m.A0 = detail::woodbury_sandwich(m.A0, m.B[arm], a_dir_post, /*add=*/false, be, c);
    } catch (const SingularMatrixError& e) {
        throw NumericalError(std::string("hybrid optimized update: ") + e.what(), m.t + 1);
    }
    m.b0 = vec_add(
        m.b0,
        vec_sub(vec_scale(rr, z, c),
                mat_vec(transpose(m.B[arm]), mat_vec(m.A[arm], m.b[arm], be, c), be, c), c),
        c);
    ++m.t;
}

template <class T>
void hybrid_update(HybridModel<T>& m, int arm, const Vector<T>& z, const Vector<T>& x, double r,
                   const Backend& be, OpCounter& c) {
    if (m.variant == Variant::standard)
        hybrid_update_standard(m, arm, z, x, r, be, c);
    else
        hybrid_update_optimized(m, arm, z, x, r, be, c);
}

// ---------------------------------------------------------------------------
// One full policy step: select, draw the reward, update, advance t.
// ---------------------------------------------------------------------------

template <class T, class RewardFn>
std::pair<Decision, double> policy_step(DisjointModel<T>& m, const std::vector<Vector<T>>& contexts,
                                        RewardFn&& reward_fn, const Backend& be, OpCounter& c) {
    Decision dec = disjoint_select(m, contexts, be, c);
    const double r = reward_fn(dec.chosen_arm);
    disjoint_update(m, dec.chosen_arm, contexts[dec.chosen_arm], r, be, c);
    return {std::move(dec), r};
}

template <class T, class RewardFn>
std::pair<Decision, double> policy_step(HybridModel<T>& m, const std::vector<HybridContext<T>>& contexts,
                                        RewardFn&& reward_fn, const Backend& be, OpCounter& c) {
    Decision dec = hybrid_select(m, contexts, be, c);
    const double r = reward_fn(dec.chosen_arm);
    hybrid_update(m, dec.chosen_arm, contexts[dec.chosen_arm].z, contexts[dec.chosen_arm].x, r, be, c);
    return {std::move(dec), r};
}

}  // namespace linucb
