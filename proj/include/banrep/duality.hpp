#pragma once

// Banach conjugates on finite-dimensional lp spaces, 1 < p < inf.

#include "banrep/core/types.hpp"

#include <cstdint>

namespace banrep::duality {

/// Hoelder conjugate exponent q with 1/p + 1/q = 1.
double conjugate_exponent(double p);

/// The duality map of lp:
///
///     x*_n = |x_n|^{p-1} sign(x_n) / ||x||_p^{p-2}
///
/// so that ||x*||_q = ||x||_p and <x*, x> = ||x||_p^2. Maps 0 to 0. Exponents
/// within 1e-9 of 2 return x unchanged. Throws UnsupportedExponent for p <= 1 or
/// p = inf, where the map is set-valued.
Vector lp_conjugate(const Vector& x, double p);

/// Weighted variant for grid-sampled functions: with quadrature weights w > 0 the
/// norm is (sum w_n |x_n|^p)^{1/p} and the pairing is sum w_n x*_n x_n. The
/// pointwise formula is the same as the unweighted one, with the weighted norm.
Vector lp_conjugate(const Vector& x, const Vector& weights, double p);

/// Weighted lp norm (sum w_n |x_n|^p)^{1/p}.
double weighted_lp_norm(const Vector& x, const Vector& weights, double p);

struct ConjugatePair {
    Vector primal;
    Vector dual;
    double p = 2.0;
    double q = 2.0;

    /// | ||dual||_q - ||primal||_p |
    double norm_residual() const;
    /// | <dual, primal> - ||dual||_q ||primal||_p |
    double duality_residual() const;
};

ConjugatePair make_conjugate_pair(const Vector& x, double p);

struct ConjugateCheck {
    bool pass = false;
    double norm_residual = 0.0;
    double duality_residual = 0.0;
    double threshold = 0.0;
};

/// Pass iff both residuals are at most tol * (1 + ||x||_p^2).
ConjugateCheck check_conjugate_pair(const Vector& x, const Vector& x_star, double p, double tol);

struct HolderPairing {
    double pairing = 0.0;  // <y, x>
    double slack = 0.0;    // ||y||_q ||x||_p - |<y, x>|, >= 0 up to rounding
    double scale = 0.0;    // ||y||_q ||x||_p
};

HolderPairing holder_pairing(const Vector& x, const Vector& y, double p);

/// 1/2 <J x, y> + 1/2 <J y, x>. Symmetric by construction, bilinear iff p = 2.
double polarization_inner(const Vector& x, const Vector& y, double p);

/// Concrete triple showing that a map built from lp_conjugate is not additive.
struct AdditivityWitness {
    Vector x;
    Vector y;
    Vector z;
    double defect = 0.0;
};

/// Random search over unit vectors in R^dim for the largest
/// |P(x + z, y) - P(x, y) - P(z, y)| where P is polarization_inner.
AdditivityWitness find_polarization_witness(double p, Index dim, std::size_t trials, std::uint64_t seed);

/// Same search for ||J(x + z) - J(x) - J(z)||_inf (y is left empty).
AdditivityWitness find_conjugate_witness(double p, Index dim, std::size_t trials, std::uint64_t seed);

}  // namespace banrep::duality
