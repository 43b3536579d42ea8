// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include "banrep/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace banrep::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d abs_pd(__m256d v) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign_mask, v);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sum_abs_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(x + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::abs(x[i]);
    return s;
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

std::size_t argmax_abs_avx2(const double* x, std::size_t n) {
    if (n < 8) {
        std::size_t best = 0;
        double best_val = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(x[i]) > best_val) {
                best_val = std::abs(x[i]);
                best = i;
            }
        }
        return best;
    }
    // Two passes: vector max, then first index attaining it. Keeps the
    // lowest-index tie rule of the scalar kernel.
    __m256d vmax = abs_pd(_mm256_loadu_pd(x));
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) vmax = _mm256_max_pd(vmax, abs_pd(_mm256_loadu_pd(x + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    double m = lanes[0];
    for (int k = 1; k < 4; ++k) m = lanes[k] > m ? lanes[k] : m;
    for (; i < n; ++i) m = std::abs(x[i]) > m ? std::abs(x[i]) : m;

    const __m256d target = _mm256_set1_pd(m);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(_mm256_loadu_pd(x + j)), target, _CMP_EQ_OQ));
        if (mask != 0) return j + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(mask)));
    }
    for (; j < n; ++j) {
        if (std::abs(x[j]) == m) return j;
    }
    return 0;  // only reachable with NaN input
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void soft_threshold_avx2(const double* x, double t, double* out, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d mag = _mm256_max_pd(_mm256_sub_pd(abs_pd(v), vt), zero);
        // Zero magnitudes stay +0 so the result matches the scalar kernel bit for bit.
        const __m256d nz = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
        const __m256d sign = _mm256_and_pd(_mm256_and_pd(v, sign_mask), nz);
        _mm256_storeu_pd(out + i, _mm256_or_pd(mag, sign));
    }
    for (; i < n; ++i) {
        const double m = std::abs(x[i]) - t;
        out[i] = m > 0.0 ? std::copysign(m, x[i]) : 0.0;
    }
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

void gemv_t_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(x[r], a + r * cols, y, cols);
}

}  // namespace

namespace detail {
const KernelTable& avx2_table() {
    static const KernelTable table{
        dot_avx2,  sum_abs_avx2,        sum_squares_avx2, argmax_abs_avx2,
        axpy_avx2, soft_threshold_avx2, gemv_avx2,        gemv_t_avx2,
    };
    return table;
}
}  // namespace detail

}  // namespace banrep::simd
