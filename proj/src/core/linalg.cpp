#include "banrep/core/linalg.hpp"

#include "banrep/core/errors.hpp"
#include "banrep/simd/kernels.hpp"

#include <cmath>

namespace banrep {

Points uniform_grid(const Box& box, Index cells) {
    const Index d = box.dimension();
    if (cells < 1) throw ValidationError("grid needs at least one cell per dimension");
    if (d != 1 && d != 2) throw ValidationError("grids are supported for d = 1 or 2");
    const Vector h = (box.upper - box.lower) / static_cast<double>(cells);
    if (d == 1) {
        Points g(cells, 1);
        for (Index i = 0; i < cells; ++i) g(i, 0) = box.lower[0] + (static_cast<double>(i) + 0.5) * h[0];
        return g;
    }
    Points g(cells * cells, 2);
    for (Index i = 0; i < cells; ++i) {
        for (Index j = 0; j < cells; ++j) {
            g(i * cells + j, 0) = box.lower[0] + (static_cast<double>(i) + 0.5) * h[0];
            g(i * cells + j, 1) = box.lower[1] + (static_cast<double>(j) + 0.5) * h[1];
        }
    }
    return g;
}

namespace linalg {

// Column-major A (m x n) is the row-major storage of A^T (n x m).

Vector apply(const Matrix& a, const Vector& x) {
    if (x.size() != a.cols()) throw DimensionError("matrix-vector product", a.cols(), x.size());
    Vector y(a.rows());
    simd::active_kernels().gemv_t(a.data(), a.cols(), a.rows(), x.data(), y.data());
    return y;
}

Vector apply_transpose(const Matrix& a, const Vector& x) {
    if (x.size() != a.rows()) throw DimensionError("transposed matrix-vector product", a.rows(), x.size());
    Vector y(a.cols());
    simd::active_kernels().gemv(a.data(), a.cols(), a.rows(), x.data(), y.data());
    return y;
}

Index numerical_rank(const Matrix& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s[i] > rel_tol * s[0]) ++r;
    }
    return r;
}

Vector null_vector(const Matrix& a, double rel_tol) {
    const Index n = a.cols();
    if (n == 0) return {};
    if (a.rows() == 0) {
        Vector e = Vector::Zero(n);
        e[0] = 1.0;
        return e;
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double smax = s.size() > 0 ? s[0] : 0.0;
    if (a.rows() < n) return svd.matrixV().col(n - 1);
    if (smax == 0.0 || s[n - 1] <= rel_tol * smax) return svd.matrixV().col(n - 1);
    return {};
}

double lp_norm(const Vector& x, double p) {
    if (x.size() == 0) return 0.0;
    const double m = simd::max_abs(as_span(x));
    if (m == 0.0) return 0.0;
    if (std::isinf(p)) return m;
    if (p == 1.0) return simd::sum_abs(as_span(x));
    if (p == 2.0) return m * std::sqrt(simd::sum_squares(as_span(Vector(x / m))));
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / m, p);
    return m * std::pow(s, 1.0 / p);
}

}  // namespace linalg
}  // namespace banrep
