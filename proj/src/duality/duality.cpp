#include "banrep/duality.hpp"

#include "banrep/core/errors.hpp"
#include "banrep/core/linalg.hpp"
#include "banrep/simd/kernels.hpp"

#include <cmath>
#include <random>

namespace banrep::duality {
namespace {

constexpr double kIdentityBand = 1e-9;

void require_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw UnsupportedExponent(p);
}

// ||x|| * (|x_n| / ||x||)^{p-1} sign(x_n); algebraically equal to the textbook
// formula but free of overflow for large entries.
Vector conjugate_with_norm(const Vector& x, double norm, double p) {
    Vector out(x.size());
    if (norm == 0.0) return Vector::Zero(x.size());
    for (Index n = 0; n < x.size(); ++n) {
        const double a = std::abs(x[n]);
        out[n] = a == 0.0 ? 0.0 : std::copysign(norm * std::pow(a / norm, p - 1.0), x[n]);
    }
    return out;
}

Vector random_unit(std::mt19937_64& rng, Index dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = normal(rng);
    return v / v.norm();
}

}  // namespace

double conjugate_exponent(double p) {
    require_exponent(p);
    return p / (p - 1.0);
}

Vector lp_conjugate(const Vector& x, double p) {
    require_exponent(p);
    if (std::abs(p - 2.0) <= kIdentityBand) return x;
    return conjugate_with_norm(x, linalg::lp_norm(x, p), p);
}

double weighted_lp_norm(const Vector& x, const Vector& weights, double p) {
    if (weights.size() != x.size()) throw DimensionError("quadrature weights", x.size(), weights.size());
    const double m = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (Index n = 0; n < x.size(); ++n) {
        if (!(weights[n] > 0.0)) throw ValidationError("quadrature weights must be positive");
        s += weights[n] * std::pow(std::abs(x[n]) / m, p);
    }
    return m * std::pow(s, 1.0 / p);
}

Vector lp_conjugate(const Vector& x, const Vector& weights, double p) {
    require_exponent(p);
    const double norm = weighted_lp_norm(x, weights, p);
    if (std::abs(p - 2.0) <= kIdentityBand) return x;
    return conjugate_with_norm(x, norm, p);
}

double ConjugatePair::norm_residual() const {
    return std::abs(linalg::lp_norm(dual, q) - linalg::lp_norm(primal, p));
}

double ConjugatePair::duality_residual() const {
    const double pairing = simd::dot(as_span(dual), as_span(primal));
    return std::abs(pairing - linalg::lp_norm(dual, q) * linalg::lp_norm(primal, p));
}

ConjugatePair make_conjugate_pair(const Vector& x, double p) {
    return ConjugatePair{x, lp_conjugate(x, p), p, conjugate_exponent(p)};
}

ConjugateCheck check_conjugate_pair(const Vector& x, const Vector& x_star, double p, double tol) {
    if (x.size() != x_star.size()) throw DimensionError("conjugate pair", x.size(), x_star.size());
    const ConjugatePair pair{x, x_star, p, conjugate_exponent(p)};
    ConjugateCheck c;
    c.norm_residual = pair.norm_residual();
    c.duality_residual = pair.duality_residual();
    const double nx = linalg::lp_norm(x, p);
    c.threshold = tol * (1.0 + nx * nx);
    c.pass = c.norm_residual <= c.threshold && c.duality_residual <= c.threshold;
    return c;
}

HolderPairing holder_pairing(const Vector& x, const Vector& y, double p) {
    if (x.size() != y.size()) throw DimensionError("hoelder pairing", x.size(), y.size());
    const double q = conjugate_exponent(p);
    HolderPairing h;
    h.pairing = simd::dot(as_span(y), as_span(x));
    h.scale = linalg::lp_norm(y, q) * linalg::lp_norm(x, p);
    h.slack = h.scale - std::abs(h.pairing);
    return h;
}

double polarization_inner(const Vector& x, const Vector& y, double p) {
    if (x.size() != y.size()) throw DimensionError("polarization", x.size(), y.size());
    const Vector jx = lp_conjugate(x, p);
    const Vector jy = lp_conjugate(y, p);
    return 0.5 * simd::dot(as_span(jx), as_span(y)) + 0.5 * simd::dot(as_span(jy), as_span(x));
}

AdditivityWitness find_polarization_witness(double p, Index dim, std::size_t trials, std::uint64_t seed) {
    require_exponent(p);
    if (dim < 1) throw ValidationError("witness search needs dim >= 1");
    std::mt19937_64 rng(seed);
    AdditivityWitness best;
    best.defect = -1.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Vector x = random_unit(rng, dim);
        Vector y = random_unit(rng, dim);
        Vector z = random_unit(rng, dim);
        const double defect = std::abs(polarization_inner(x + z, y, p) - polarization_inner(x, y, p) - polarization_inner(z, y, p));
        if (defect > best.defect) best = AdditivityWitness{std::move(x), std::move(y), std::move(z), defect};
    }
    return best;
}

AdditivityWitness find_conjugate_witness(double p, Index dim, std::size_t trials, std::uint64_t seed) {
    require_exponent(p);
    if (dim < 1) throw ValidationError("witness search needs dim >= 1");
    std::mt19937_64 rng(seed);
    AdditivityWitness best;
    best.defect = -1.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Vector x = random_unit(rng, dim);
        Vector z = random_unit(rng, dim);
        const Vector gap = lp_conjugate(x + z, p) - lp_conjugate(x, p) - lp_conjugate(z, p);
        const double defect = gap.cwiseAbs().maxCoeff();
        if (defect > best.defect) best = AdditivityWitness{std::move(x), Vector{}, std::move(z), defect};
    }
    return best;
}

}  // namespace banrep::duality
