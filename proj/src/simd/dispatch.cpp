#include "banrep/simd/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

namespace banrep::simd {

#if defined(BANREP_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table();
}
#endif

namespace {

bool cpu_has_avx2() {
#if defined(BANREP_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() {
    if (const char* env = std::getenv("BANREP_SIMD")) {
        if (std::string(env) == "scalar") return Backend::scalar;
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

}  // namespace

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(BANREP_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

const KernelTable& active_kernels() {
    if (active_backend() == Backend::avx2) {
        if (const KernelTable* t = avx2_kernels()) return *t;
    }
    return scalar_kernels();
}

Backend force_backend(Backend b) {
    if (b == Backend::avx2 && avx2_kernels() == nullptr) b = Backend::scalar;
    current().store(b, std::memory_order_relaxed);
    return b;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return active_kernels().dot(x.data(), y.data(), x.size());
}

double sum_abs(std::span<const double> x) { return active_kernels().sum_abs(x.data(), x.size()); }

double sum_squares(std::span<const double> x) { return active_kernels().sum_squares(x.data(), x.size()); }

double max_abs(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double v = x[active_kernels().argmax_abs(x.data(), x.size())];
    return v < 0.0 ? -v : v;
}

std::size_t argmax_abs(std::span<const double> x) { return active_kernels().argmax_abs(x.data(), x.size()); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    active_kernels().axpy(a, x.data(), y.data(), x.size());
}

void soft_threshold(std::span<const double> x, double t, std::span<double> out) {
    assert(x.size() == out.size());
    active_kernels().soft_threshold(x.data(), t, out.data(), x.size());
}

}  // namespace banrep::simd
