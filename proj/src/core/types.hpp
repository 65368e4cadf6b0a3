#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"

namespace cfv {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Symmetric matrix held as the packed upper triangle, so entry(i,j) == entry(j,i)
// by construction.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {
        require(dim >= 1, ErrorCode::validation, "SymMatrix: dim must be >= 1");
    }

    static SymMatrix identity(std::size_t n) {
        SymMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    // Symmetrizes dense input: off-diagonal pairs are averaged.
    static SymMatrix from_dense(const Matrix& m) {
        require(m.rows() == m.cols() && m.rows() >= 1, ErrorCode::validation,
                "SymMatrix: input must be square and non-empty");
        SymMatrix s(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = i; j < m.cols(); ++j)
                s.at(i, j) = (i == j) ? m(i, j) : 0.5 * (m(i, j) + m(j, i));
        return s;
    }

    static SymMatrix diagonal(const Vector& d) {
        SymMatrix s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) s.at(i, i) = d[i];
        return s;
    }

    std::size_t dim() const { return dim_; }

    double& at(std::size_t i, std::size_t j) { return packed_[index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }

    Vector diag() const {
        Vector d(dim_);
        for (std::size_t i = 0; i < dim_; ++i) d[i] = at(i, i);
        return d;
    }

    Matrix dense() const {
        Matrix m(dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j) m(i, j) = m(j, i) = at(i, j);
        return m;
    }

    std::vector<double>& packed() { return packed_; }
    const std::vector<double>& packed() const { return packed_; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    bool all_finite() const {
        for (double v : packed_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    // y = M x
    void multiply(const double* x, double* y) const {
        for (std::size_t i = 0; i < dim_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) acc += at(i, j) * x[j];
            y[i] = acc;
        }
    }

private:
    // row-major upper-triangle packing: (i,j) with i<=j at offset i*dim - i(i-1)/2 ... standard map
    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * dim_ - i * (i + 1) / 2 + j;
    }

    std::size_t dim_ = 0;
    std::vector<double> packed_;
};

inline double max_abs(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace cfv
