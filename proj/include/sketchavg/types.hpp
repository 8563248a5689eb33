#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sketchavg/errors.hpp"

namespace sketchavg {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Element access is unchecked; shape
// checks happen at operation boundaries.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix from_data(std::size_t rows, std::size_t cols, Vector data) {
        if (data.size() != rows * cols)
            throw ShapeMismatch("from_data: got " + std::to_string(data.size()) +
                                " values for a " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " matrix");
        Matrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.data_ = std::move(data);
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const double& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    Vector& data() { return data_; }
    const Vector& data() const { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

inline void ensure_finite(const Vector& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw IoError(std::string(what) + ": non-finite value");
}

inline void ensure_finite(const Matrix& m, const char* what) {
    if (!m.all_finite()) throw IoError(std::string(what) + ": non-finite value");
}

// Compensated (Neumaier) accumulator. Used wherever a sum must not depend
// on how work was split across threads.
struct NeumaierSum {
    double s = 0.0;
    double c = 0.0;

    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }

    double value() const { return s + c; }
};

inline double dot(const Vector& a, const Vector& b) {
    NeumaierSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
    return acc.value();
}

inline double squared_norm(const Vector& v) {
    NeumaierSum acc;
    for (double x : v) acc.add(x * x);
    return acc.value();
}

}  // namespace sketchavg
