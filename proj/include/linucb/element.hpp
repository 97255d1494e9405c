#pragma once

#include <cmath>

#include "linucb/fixed.hpp"

namespace linucb {

// Uniform access to the two element types the kernels are instantiated
// with: IEEE double and Q-format fixed point.
template <class T>
struct ElemOps;

template <>
struct ElemOps<double> {
    static constexpr bool is_fixed = false;
    static double from_double(double x) { return x; }
    static double to_double(double x) { return x; }
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double sqrt(double x) { return std::sqrt(x); }
    static bool is_zero(double x) { return x == 0.0; }
    static const char* name() { return "f64"; }
};

template <int FB>
struct ElemOps<Fixed<FB>> {
    static constexpr bool is_fixed = true;
    static Fixed<FB> from_double(double x) { return Fixed<FB>::from_double(x); }
    static double to_double(Fixed<FB> x) { return x.to_double(); }
    static Fixed<FB> zero() { return Fixed<FB>::zero(); }
    static Fixed<FB> one() { return Fixed<FB>::one(); }
    static Fixed<FB> sqrt(Fixed<FB> x) { return x.sqrt(); }
    static bool is_zero(Fixed<FB> x) { return x.raw() == 0; }
    static const char* name() { return "q16"; }
};

}  // namespace linucb
