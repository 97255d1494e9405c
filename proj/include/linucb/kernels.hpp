#pragma once

#include <cmath>
#include <cstdlib>
#include <string>

#include "linucb/matrix.hpp"
#include "linucb/opcount.hpp"

namespace linucb {

// Dense kernels instrumented with the two-counter cost model.  Both
// backends execute identical arithmetic; only the charging differs, so
// Scalar and VectorModel results are bit-identical by construction.

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

template <class T>
double abs_value(T x) {
    if constexpr (ElemOps<T>::is_fixed) {
        return std::llabs(x.raw());
    } else {
        return std::fabs(x);
    }
}

}  // namespace detail

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
    Matrix<T> out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

template <class T>
Matrix<T> mat_add(const Matrix<T>& a, const Matrix<T>& b, const Backend& be, OpCounter& c) {
    detail::require(a.same_shape(b), "mat_add: shape mismatch");
    Matrix<T> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        c.charge(KernelKind::add, be, a.cols());
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    }
    return out;
}

template <class T>
Matrix<T> mat_sub(const Matrix<T>& a, const Matrix<T>& b, const Backend& be, OpCounter& c) {
    detail::require(a.same_shape(b), "mat_sub: shape mismatch");
    Matrix<T> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        c.charge(KernelKind::sub, be, a.cols());
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    }
    return out;
}

// Row-times-scalar accumulation: each inner index contributes one
// vector-scalar multiply pass over the output row plus one accumulate pass.
template <class T>
Matrix<T> mat_mul(const Matrix<T>& a, const Matrix<T>& b, const Backend& be, OpCounter& c) {
    detail::require(a.cols() == b.rows(), "mat_mul: inner dimensions differ");
    Matrix<T> out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        T* acc = out.row(i);
        for (int l = 0; l < a.cols(); ++l) {
            const T s = a(i, l);
            const T* brow = b.row(l);
            c.charge(KernelKind::mul, be, b.cols());
            c.charge(KernelKind::mul, be, b.cols());
            for (int j = 0; j < b.cols(); ++j) acc[j] = acc[j] + s * brow[j];
        }
    }
    return out;
}

// Specialization of mat_mul for a single output column; cost model follows
// mat_mul with b.cols = 1.
template <class T>
Vector<T> mat_vec(const Matrix<T>& a, const Vector<T>& x, const Backend& be, OpCounter& c) {
    detail::require(a.cols() == x.len(), "mat_vec: shape mismatch");
    Vector<T> out(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        T acc = ElemOps<T>::zero();
        for (int l = 0; l < a.cols(); ++l) {
            c.charge(KernelKind::matvec, be, 1);
            c.charge(KernelKind::matvec, be, 1);
            acc = acc + a(i, l) * x[l];
        }
        out[i] = acc;
    }
    return out;
}

template <class T>
Matrix<T> outer(const Vector<T>& u, const Vector<T>& v, OpCounter& c) {
    Matrix<T> out(u.len(), v.len());
    c.charge_scalar(KernelKind::outer, static_cast<std::uint64_t>(u.len()) * v.len());
    for (int i = 0; i < u.len(); ++i)
        for (int j = 0; j < v.len(); ++j) out(i, j) = u[i] * v[j];
    return out;
}

template <class T>
T dot(const Vector<T>& u, const Vector<T>& v, OpCounter& c) {
    detail::require(u.len() == v.len(), "dot: length mismatch");
    c.charge_scalar(KernelKind::dot, 2 * static_cast<std::uint64_t>(u.len()));
    T acc = ElemOps<T>::zero();
    for (int i = 0; i < u.len(); ++i) acc = acc + u[i] * v[i];
    return acc;
}

template <class T>
Vector<T> vec_add(const Vector<T>& a, const Vector<T>& b, OpCounter& c) {
    detail::require(a.len() == b.len(), "vec_add: length mismatch");
    c.charge_scalar(KernelKind::vec, a.len());
    Vector<T> out(a.len());
    for (int i = 0; i < a.len(); ++i) out[i] = a[i] + b[i];
    return out;
}

template <class T>
Vector<T> vec_sub(const Vector<T>& a, const Vector<T>& b, OpCounter& c) {
    detail::require(a.len() == b.len(), "vec_sub: length mismatch");
    c.charge_scalar(KernelKind::vec, a.len());
    Vector<T> out(a.len());
    for (int i = 0; i < a.len(); ++i) out[i] = a[i] - b[i];
    return out;
}

// y += alpha * x
template <class T>
void axpy(T alpha, const Vector<T>& x, Vector<T>& y, OpCounter& c) {
    detail::require(x.len() == y.len(), "axpy: length mismatch");
    c.charge_scalar(KernelKind::vec, 2 * static_cast<std::uint64_t>(x.len()));
    for (int i = 0; i < x.len(); ++i) y[i] = y[i] + alpha * x[i];
}

template <class T>
Vector<T> vec_scale(T alpha, const Vector<T>& x, OpCounter& c) {
    c.charge_scalar(KernelKind::vec, x.len());
    Vector<T> out(x.len());
    for (int i = 0; i < x.len(); ++i) out[i] = alpha * x[i];
    return out;
}

template <class T>
Vector<T> vec_div_scalar(const Vector<T>& x, T denom, OpCounter& c) {
    c.charge_scalar(KernelKind::vec, x.len());
    Vector<T> out(x.len());
    for (int i = 0; i < x.len(); ++i) out[i] = x[i] / denom;
    return out;
}

// Inversion by LU-style Gauss-Jordan elimination on the augmented [A | I]
// block with full-width row operations (the shape hardware vector loops
// take).  Float path uses partial (row) pivoting; the fixed-point path runs
// pivot-free, mirroring the hardware kernel -- all policy inputs are SPD so
// exact arithmetic never hits a zero pivot there.
template <class T>
Matrix<T> lu_invert(const Matrix<T>& a, const Backend& be, OpCounter& c) {
    detail::require(a.rows() == a.cols(), "lu_invert: matrix must be square");
    const int n = a.rows();
    const int w = 2 * n;
    Matrix<T> aug(n, w);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = ElemOps<T>::one();
    }

    for (int col = 0; col < n; ++col) {
        if constexpr (!ElemOps<T>::is_fixed) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (detail::abs_value(aug(r, col)) > detail::abs_value(aug(piv, col))) piv = r;
            if (piv != col)
                for (int j = 0; j < w; ++j) std::swap(aug(col, j), aug(piv, j));
        }
        const T pivot = aug(col, col);
        if constexpr (ElemOps<T>::is_fixed) {
            if (pivot.raw() == 0) throw SingularMatrixError("lu_invert: zero pivot at column " + std::to_string(col));
        } else {
            if (std::fabs(ElemOps<T>::to_double(pivot)) < 1e-12)
                throw SingularMatrixError("lu_invert: tiny pivot at column " + std::to_string(col));
        }
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            c.charge(KernelKind::invert, be, 1);  // factor division
            const T factor = aug(row, col) / pivot;
            c.charge(KernelKind::invert, be, w);
            c.charge(KernelKind::invert, be, w);
            T* dst = aug.row(row);
            const T* src = aug.row(col);
            for (int j = 0; j < w; ++j) dst[j] = dst[j] - factor * src[j];
        }
    }

    // element-wise division passes normalize each row by its pivot
    for (int row = 0; row < n; ++row) {
        const T pivot = aug(row, row);
        c.charge(KernelKind::invert, be, w);
        T* dst = aug.row(row);
        for (int j = 0; j < w; ++j) dst[j] = dst[j] / pivot;
    }

    Matrix<T> out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
    return out;
}

template <class T>
double frobenius_diff(const Matrix<T>& a, const Matrix<T>& b) {
    detail::require(a.same_shape(b), "frobenius_diff: shape mismatch");
    double acc = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double d = ElemOps<T>::to_double(a(i, j)) - ElemOps<T>::to_double(b(i, j));
            acc += d * d;
        }
    return std::sqrt(acc);
}

template <class T>
double frobenius_norm(const Matrix<T>& a) {
    double acc = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double v = ElemOps<T>::to_double(a(i, j));
            acc += v * v;
        }
    return std::sqrt(acc);
}

}  // namespace linucb
