#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blockout/errors.hpp"

namespace blockout {

// Row-major dense matrix of doubles. The single numeric carrier used by every
// module: weights, masks, assignments, activations and gradients are all
// DenseMatrix values. 64-bit precision throughout; finite-difference checks
// need the headroom and the sizes involved are small.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols, 0.0}; }
    static DenseMatrix ones(std::size_t rows, std::size_t cols) { return {rows, cols, 1.0}; }
    static DenseMatrix constant(std::size_t rows, std::size_t cols, double v) { return {rows, cols, v}; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const DenseMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    std::string shape_string() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Shape contract shared by every operation below: mismatched operands raise
// ShapeError naming the operation and both shapes.

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a * transpose(b) and transpose(a) * b without materializing the transpose.
DenseMatrix matmul_abt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_atb(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix scale(const DenseMatrix& a, double s);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

std::vector<double> row_sums(const DenseMatrix& a);
std::vector<double> col_sums(const DenseMatrix& a);

// Logistic map 1/(1+e^-x). Output is kept strictly inside (0,1) for every
// finite input, including arguments far past the underflow threshold.
double logistic(double x);
double logistic_derivative(double x);
DenseMatrix logistic(const DenseMatrix& a);
DenseMatrix logistic_derivative(const DenseMatrix& a);

// Index of the largest entry per row / per column; ties resolve to the
// lowest index.
std::vector<std::size_t> argmax_rows(const DenseMatrix& a);
std::vector<std::size_t> argmax_cols(const DenseMatrix& a);

double max_abs(const DenseMatrix& a);

}  // namespace blockout
