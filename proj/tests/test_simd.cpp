#include "banrep/simd/kernels.hpp"

#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

using namespace banrep::simd;

namespace {

std::vector<double> normal_data(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(rng);
    return v;
}

double rel_err(double a, double b, double scale) { return std::abs(a - b) / std::max(1.0, scale); }

}  // namespace

TEST_CASE("scalar kernels on hand inputs") {
    const KernelTable& k = scalar_kernels();
    const double x[] = {1.0, -3.0, 2.0, 3.0};
    const double y[] = {2.0, 1.0, 0.5, -1.0};
    CHECK(k.dot(x, y, 4) == doctest::Approx(2.0 - 3.0 + 1.0 - 3.0));
    CHECK(k.sum_abs(x, 4) == 9.0);
    CHECK(k.sum_squares(x, 4) == 23.0);
    CHECK(k.argmax_abs(x, 4) == 1);  // tie between -3 and 3 goes to the lower index
    CHECK(k.argmax_abs(x, 0) == 0);
    double out[4];
    k.soft_threshold(x, 1.5, out, 4);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == -1.5);
    CHECK(out[2] == 0.5);
    CHECK(out[3] == 1.5);
    const double a[] = {1, 2, 3, 4, 5, 6};  // 2 x 3
    const double v3[] = {1, 0, -1};
    const double v2[] = {1, 1};
    double o2[2];
    double o3[3];
    k.gemv(a, 2, 3, v3, o2);
    CHECK(o2[0] == -2.0);
    CHECK(o2[1] == -2.0);
    k.gemv_t(a, 2, 3, v2, o3);
    CHECK(o3[0] == 5.0);
    CHECK(o3[1] == 7.0);
    CHECK(o3[2] == 9.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const KernelTable* fast = avx2_kernels();
    if (fast == nullptr) {
        MESSAGE("AVX2 variant unavailable on this machine; equivalence not exercised");
        return;
    }
    const KernelTable& ref = scalar_kernels();
    std::mt19937_64 rng(5);
    for (std::size_t n = 0; n < 70; ++n) {
        const auto x = normal_data(rng, n);
        const auto y = normal_data(rng, n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
        CHECK(rel_err(fast->dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n), scale) <= 1e-14);
        CHECK(rel_err(fast->sum_abs(x.data(), n), ref.sum_abs(x.data(), n), ref.sum_abs(x.data(), n)) <= 1e-14);
        CHECK(rel_err(fast->sum_squares(x.data(), n), ref.sum_squares(x.data(), n), ref.sum_squares(x.data(), n)) <= 1e-14);
        CHECK(fast->argmax_abs(x.data(), n) == ref.argmax_abs(x.data(), n));

        auto ya = y;
        auto yb = y;
        fast->axpy(0.7, x.data(), ya.data(), n);
        ref.axpy(0.7, x.data(), yb.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ya[i] - yb[i]) <= 1e-15 * (1.0 + std::abs(yb[i])));

        std::vector<double> sa(n), sb(n);
        fast->soft_threshold(x.data(), 0.4, sa.data(), n);
        ref.soft_threshold(x.data(), 0.4, sb.data(), n);
        CHECK(sa == sb);

        const std::size_t cols = 1 + n % 9;
        const auto a = normal_data(rng, n * cols);
        const auto vc = normal_data(rng, cols);
        const auto vr = normal_data(rng, n);
        std::vector<double> ga(n), gb(n), ta(cols), tb(cols);
        fast->gemv(a.data(), n, cols, vc.data(), ga.data());
        ref.gemv(a.data(), n, cols, vc.data(), gb.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ga[i] - gb[i]) <= 1e-13 * (1.0 + std::abs(gb[i])));
        fast->gemv_t(a.data(), n, cols, vr.data(), ta.data());
        ref.gemv_t(a.data(), n, cols, vr.data(), tb.data());
        for (std::size_t j = 0; j < cols; ++j) CHECK(std::abs(ta[j] - tb[j]) <= 1e-13 * (1.0 + std::abs(tb[j])));
    }
}

TEST_CASE("argmax ties resolve to the lowest index on both backends") {
    std::vector<double> v(37, 1.0);
    v[20] = -5.0;
    v[9] = 5.0;
    v[30] = 5.0;
    CHECK(scalar_kernels().argmax_abs(v.data(), v.size()) == 9);
    if (const KernelTable* fast = avx2_kernels()) CHECK(fast->argmax_abs(v.data(), v.size()) == 9);
}

TEST_CASE("backend can be pinned to scalar") {
    const Backend before = active_backend();
    CHECK(force_backend(Backend::scalar) == Backend::scalar);
    CHECK(active_backend() == Backend::scalar);
    CHECK(&active_kernels() == &scalar_kernels());
    const std::vector<double> x = {3.0, -4.0};
    CHECK(sum_squares(x) == 25.0);
    CHECK(max_abs(x) == 4.0);
    force_backend(before);
    CHECK(backend_name(Backend::avx2) == "avx2");
}
