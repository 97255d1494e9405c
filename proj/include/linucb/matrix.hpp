#pragma once

#include <string>
#include <vector>

#include "linucb/element.hpp"
#include "linucb/errors.hpp"

namespace linucb {

// Dense row-major matrix over double or Fixed<FB>.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(check_extent(rows, cols), ElemOps<T>::zero()) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = ElemOps<T>::one();
        return m;
    }

    static Matrix scaled_identity(int n, T value) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = value;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    T* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
    const T* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    static std::size_t check_extent(int rows, int cols) {
        if (rows <= 0 || cols <= 0) {
            throw DimensionError("matrix extent must be positive, got " + std::to_string(rows) +
                                 "x" + std::to_string(cols));
        }
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

template <class T>
class Vector {
public:
    Vector() = default;
    explicit Vector(int len) : data_(check_len(len), ElemOps<T>::zero()) {}
    explicit Vector(std::vector<T> values) : data_(std::move(values)) {
        check_len(static_cast<int>(data_.size()));
    }

    static Vector unit(int len, int axis) {
        Vector v(len);
        v[axis] = ElemOps<T>::one();
        return v;
    }

    int len() const { return static_cast<int>(data_.size()); }

    T& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
    const T& operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    friend bool operator==(const Vector& a, const Vector& b) { return a.data_ == b.data_; }

private:
    static int check_len(int len) {
        if (len <= 0) throw DimensionError("vector length must be positive, got " + std::to_string(len));
        return len;
    }

    std::vector<T> data_;
};

// Lossless-ish conversions used at the float/fixed boundary (bench and
// fidelity experiments).
template <class To, class From>
Matrix<To> convert(const Matrix<From>& m) {
    Matrix<To> out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            out(i, j) = ElemOps<To>::from_double(ElemOps<From>::to_double(m(i, j)));
    return out;
}

template <class To, class From>
Vector<To> convert(const Vector<From>& v) {
    Vector<To> out(v.len());
    for (int i = 0; i < v.len(); ++i) out[i] = ElemOps<To>::from_double(ElemOps<From>::to_double(v[i]));
    return out;
}

}  // namespace linucb
