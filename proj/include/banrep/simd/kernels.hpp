#pragma once

// Dense inner-loop kernels used by the solvers.
//
// Every kernel has a portable scalar reference implementation. On x86-64 an
// AVX2+FMA variant is compiled into a separate translation unit and selected
// at runtime when the CPU supports it. Setting BANREP_SIMD=scalar in the
// environment (or calling force_backend) pins the scalar path.

#include <cstddef>
#include <span>
#include <string_view>

namespace banrep::simd {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);

/// Function table for one backend. Matrices are dense row-major.
struct KernelTable {
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum_abs)(const double* x, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
    /// Index of the first entry with the largest magnitude; 0 when n == 0.
    std::size_t (*argmax_abs)(const double* x, std::size_t n);
    /// y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// out[i] = sign(x[i]) * max(|x[i]| - t, 0)
    void (*soft_threshold)(const double* x, double t, double* out, std::size_t n);
    /// y = A x, A is rows x cols.
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
    /// y = A^T x, A is rows x cols (so x has `rows` entries, y has `cols`).
    void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

Backend active_backend();
const KernelTable& active_kernels();

/// Override runtime selection. Requesting avx2 on a machine without it
/// silently keeps the scalar backend; the return value is the backend in use.
Backend force_backend(Backend b);

// Span front ends over the active table.

double dot(std::span<const double> x, std::span<const double> y);
double sum_abs(std::span<const double> x);
double sum_squares(std::span<const double> x);
double max_abs(std::span<const double> x);
std::size_t argmax_abs(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void soft_threshold(std::span<const double> x, double t, std::span<double> out);

}  // namespace banrep::simd
