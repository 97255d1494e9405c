#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace linucb {

// Kernel families the counter keeps a breakdown for.
enum class KernelKind : int {
    add = 0,
    sub,
    mul,
    matvec,
    outer,
    dot,
    invert,
    vec,     // small vector helpers (axpy, scale, elementwise div)
    policy,  // score assembly and other glue arithmetic
    kCount
};

inline const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::add: return "add";
        case KernelKind::sub: return "sub";
        case KernelKind::mul: return "mul";
        case KernelKind::matvec: return "matvec";
        case KernelKind::outer: return "outer";
        case KernelKind::dot: return "dot";
        case KernelKind::invert: return "invert";
        case KernelKind::vec: return "vec";
        case KernelKind::policy: return "policy";
        default: return "?";
    }
}

// Execution backend.  Both backends run the same arithmetic; the vector
// model only changes how work is charged to the counter: one vector
// instruction over n elements costs ceil(n/simd) issue slots.
struct Backend {
    enum class Kind { scalar, vector_model };
    Kind kind = Kind::scalar;
    int simd = 4;

    static Backend scalar() { return Backend{Kind::scalar, 1}; }
    static Backend vector_model(int simd = 4) {
        if (simd < 1) throw std::invalid_argument("vector model needs simd >= 1");
        return Backend{Kind::vector_model, simd};
    }
    bool is_vector() const { return kind == Kind::vector_model; }
};

// Tally of elementary scalar operations (adds, subs, muls, divs, sqrts all
// count 1) and vector issue slots.  The cost model standing in for cycle
// counts; monotonically non-decreasing until reset().
struct OpCounter {
    std::uint64_t scalar_ops = 0;
    std::uint64_t vector_slots = 0;

    struct Tally {
        std::uint64_t scalar_ops = 0;
        std::uint64_t vector_slots = 0;
    };
    std::array<Tally, static_cast<int>(KernelKind::kCount)> by_kind{};

    void reset() { *this = OpCounter{}; }

    // One elementary vector instruction over `len` elements inside a kernel
    // running on `be`.
    void charge(KernelKind kind, const Backend& be, std::uint64_t len) {
        auto& t = by_kind[static_cast<int>(kind)];
        if (be.is_vector()) {
            const std::uint64_t slots = (len + be.simd - 1) / be.simd;
            vector_slots += slots;
            t.vector_slots += slots;
        } else {
            scalar_ops += len;
            t.scalar_ops += len;
        }
    }

    // Arithmetic that stays on the scalar core regardless of backend.
    void charge_scalar(KernelKind kind, std::uint64_t n) {
        scalar_ops += n;
        by_kind[static_cast<int>(kind)].scalar_ops += n;
    }

    std::uint64_t total() const { return scalar_ops + vector_slots; }
};

}  // namespace linucb
