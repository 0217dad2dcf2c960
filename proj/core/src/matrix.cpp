#include "blockout/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blockout {

namespace {

[[noreturn]] void throw_shape(const char* op, const DenseMatrix& a, const DenseMatrix& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                     b.shape_string());
}

void require_same_shape(const char* op, const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw_shape(op, a, b);
}

}  // namespace

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    DenseMatrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols_)
            throw ShapeError("from_rows: ragged row " + std::to_string(r) + ", expected " +
                             std::to_string(m.cols_) + " entries, got " + std::to_string(row.size()));
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw_shape("matmul", a, b);
    DenseMatrix out(a.rows(), b.cols(), 0.0);
    // i-k-j order: accumulation over k stays ascending per output entry.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            const double* brow = b.data() + k * b.cols();
            double* orow = out.data() + i * out.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

DenseMatrix matmul_abt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw_shape("matmul_abt", a, b);
    DenseMatrix out(a.rows(), b.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.data() + j * b.cols();
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
            out(i, j) = acc;
        }
    }
    return out;
}

DenseMatrix matmul_atb(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw_shape("matmul_atb", a, b);
    DenseMatrix out(a.cols(), b.cols(), 0.0);
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.data() + k * a.cols();
        const double* brow = b.data() + k * b.cols();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            double* orow = out.data() + i * out.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape("hadamard", a, b);
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= b.values()[i];
    return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
    return out;
}

DenseMatrix scale(const DenseMatrix& a, double s) {
    DenseMatrix out = a;
    for (double& v : out.values()) v *= s;
    return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape("add", a, b);
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += b.values()[i];
    return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape("subtract", a, b);
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] -= b.values()[i];
    return out;
}

std::vector<double> row_sums(const DenseMatrix& a) {
    std::vector<double> sums(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) sums[r] += a(r, c);
    return sums;
}

std::vector<double> col_sums(const DenseMatrix& a) {
    std::vector<double> sums(a.cols(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) sums[c] += a(r, c);
    return sums;
}

double logistic(double x) {
    double v;
    if (x >= 0.0) {
        v = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        v = e / (1.0 + e);
    }
    // Pin the value strictly inside (0,1); the naive expression saturates to
    // exactly 0 past x ~ -745 and exactly 1 past x ~ +37.
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::clamp(v, lo, hi);
}

double logistic_derivative(double x) {
    const double s = logistic(x);
    return s * (1.0 - s);
}

DenseMatrix logistic(const DenseMatrix& a) {
    DenseMatrix out = a;
    for (double& v : out.values()) v = logistic(v);
    return out;
}

DenseMatrix logistic_derivative(const DenseMatrix& a) {
    DenseMatrix out = a;
    for (double& v : out.values()) v = logistic_derivative(v);
    return out;
}

std::vector<std::size_t> argmax_rows(const DenseMatrix& a) {
    std::vector<std::size_t> idx(a.rows(), 0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double best = a(r, 0);
        for (std::size_t c = 1; c < a.cols(); ++c) {
            if (a(r, c) > best) {
                best = a(r, c);
                idx[r] = c;
            }
        }
    }
    return idx;
}

std::vector<std::size_t> argmax_cols(const DenseMatrix& a) {
    std::vector<std::size_t> idx(a.cols(), 0);
    for (std::size_t c = 0; c < a.cols(); ++c) {
        double best = a(0, c);
        for (std::size_t r = 1; r < a.rows(); ++r) {
            if (a(r, c) > best) {
                best = a(r, c);
                idx[c] = r;
            }
        }
    }
    return idx;
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace blockout
