#include "banrep/simd/kernels.hpp"

#include <cmath>

namespace banrep::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sum_abs_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(x[i]);
    return s;
}

double sum_squares_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

std::size_t argmax_abs_scalar(const double* x, std::size_t n) {
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::abs(x[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    return best;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void soft_threshold_scalar(const double* x, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(x[i]) - t;
        out[i] = m > 0.0 ? std::copysign(m, x[i]) : 0.0;
    }
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(x[r], a + r * cols, y, cols);
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        dot_scalar,  sum_abs_scalar,        sum_squares_scalar, argmax_abs_scalar,
        axpy_scalar, soft_threshold_scalar, gemv_scalar,        gemv_t_scalar,
    };
    return table;
}

}  // namespace banrep::simd
