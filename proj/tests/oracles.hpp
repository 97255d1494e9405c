#pragma once

// Independent reference implementations the kernel and policy tests check
// against.  Everything here is deliberately written the dumb way and stays
// off the library's code paths.

#include <cmath>
#include <vector>

#include "linucb/matrix.hpp"
#include "linucb/synthenv.hpp"

namespace oracles {

using linucb::Matrix;
using linucb::SplitMix64;
using linucb::Vector;

inline Matrix<double> loop_add(const Matrix<double>& a, const Matrix<double>& b) {
    Matrix<double> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return out;
}

inline Matrix<double> loop_mul(const Matrix<double>& a, const Matrix<double>& b) {
    Matrix<double> out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (int l = 0; l < a.cols(); ++l) acc += a(i, l) * b(l, j);
            out(i, j) = acc;
        }
    return out;
}

inline Vector<double> loop_mat_vec(const Matrix<double>& a, const Vector<double>& x) {
    Vector<double> out(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

// Kahan-compensated dot product.
inline double compensated_dot(const Vector<double>& u, const Vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (int i = 0; i < u.len(); ++i) {
        const double term = u[i] * v[i] - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

inline double direct_frobenius_diff(const Matrix<double>& a, const Matrix<double>& b) {
    double acc = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) acc += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    return std::sqrt(acc);
}

// Closed-form 2x2 inverse.
inline Matrix<double> inv2x2(const Matrix<double>& m) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Matrix<double> out(2, 2);
    out(0, 0) = m(1, 1) / det;
    out(0, 1) = -m(0, 1) / det;
    out(1, 0) = -m(1, 0) / det;
    out(1, 1) = m(0, 0) / det;
    return out;
}

// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation method.
inline std::vector<double> jacobi_eigenvalues(Matrix<double> m) {
    const int n = m.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) < 1e-18) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (int i = 0; i < n; ++i) {
                    const double mpi = m(p, i), mqi = m(q, i);
                    m(p, i) = c * mpi - s * mqi;
                    m(q, i) = s * mpi + c * mqi;
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = m(i, i);
    return eig;
}

inline Matrix<double> random_matrix(SplitMix64& rng, int rows, int cols, double scale = 1.0) {
    Matrix<double> m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.uniform_sym();
    return m;
}

inline Vector<double> random_vector(SplitMix64& rng, int len, double scale = 1.0) {
    Vector<double> v(len);
    for (int i = 0; i < len; ++i) v[i] = scale * rng.uniform_sym();
    return v;
}

// Well-conditioned SPD test matrix: A^T A + I.
inline Matrix<double> random_spd(SplitMix64& rng, int n) {
    const Matrix<double> a = random_matrix(rng, n, n);
    Matrix<double> out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int l = 0; l < n; ++l) acc += a(l, i) * a(l, j);
            out(i, j) = acc + (i == j ? 1.0 : 0.0);
        }
    return out;
}

}  // namespace oracles
