#pragma once

// lp-regularized discrete inverse problems
//
//     s = argmin_x E(y, H x) + lambda ||x||_p^p,   1 <= p < inf
//
// together with the dual certificate a in R^M that parameterizes the solution
// through the conjugate map, and support pruning of l1 solutions.

#include "banrep/core/loss.hpp"
#include "banrep/core/types.hpp"

#include <optional>
#include <vector>

namespace banrep::lp {

/// |s_n| > kSupportThreshold * ||s||_inf defines the support.
inline constexpr double kSupportThreshold = 1e-8;

struct LpSolution {
    Vector s;
    std::optional<Vector> a;
    double p = 1.0;
    std::vector<Index> support;
};

struct LpOptions {
    /// Target for the stationarity residual, relative to stationarity_scale().
    double tolerance = 1e-9;
    std::size_t max_newton_iterations = 500;
    std::size_t max_fista_iterations = 20000;
    /// Skip the active-set polish for p = 1 (FISTA only).
    bool polish = true;
    /// Starting point; zero when absent.
    std::optional<Vector> initial;
};

struct LpResult {
    LpSolution solution;
    SolveReport report;
};

LpResult lp_primal_solve(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss,
                         const LpOptions& options = {});

double lp_objective(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss, const Vector& x);

/// Penalty used for 1 < p < 2: (t^2 + eps^2)^{p/2} - eps^p. eps = 0 gives |t|^p.
double smoothed_power(double t, double p, double eps);
double smoothed_power_derivative(double t, double p, double eps);

/// Gradient of E(y, H x) + lambda sum_n smoothed_power(x_n, p, eps), p > 1.
Vector objective_gradient(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss, const Vector& x,
                          double eps = 0.0);

/// max(1, ||H^T grad_z E(y, 0)||_inf): the gradient magnitude at the origin.
double stationarity_scale(const Matrix& h, const Vector& y, const Loss& loss);

/// p > 1: ||lambda p |s|^{p-1} sign(s) - g||_inf with g = -H^T grad_z E(y, H s).
/// p = 1: worst violation of the subgradient inclusion g in lambda d||s||_1.
double stationarity_residual(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss, const Vector& s);

std::vector<Index> support_of(const Vector& s, double rel_threshold = kSupportThreshold);

/// Certificate a = -grad_z E(y, H s) / (lambda p), which satisfies
/// |s_n|^{p-1} sign(s_n) = (H^T a)_n at a stationary point. This is the KKT
/// scaling: it differs from the normalized representer parameter by the
/// positive factor ||H^T a||_q^{q-2}, which is absorbed into a.
///
/// Throws NumericError when the stationarity residual exceeds
/// `max_relative_residual * stationarity_scale`.
Vector dual_certificate(const LpSolution& solution, const Matrix& h, const Vector& y, double lambda, const Loss& loss,
                        double max_relative_residual = 1e-6);

/// max_n | |s_n|^{p-1} sign(s_n) - (H^T a)_n |.
double certificate_residual(const Vector& s, const Matrix& h, const Vector& a, double p);

/// Solution rebuilt from a certificate: s_n = |v_n|^{q-1} sign(v_n), v = H^T a.
Vector primal_from_certificate(const Matrix& h, const Vector& a, double p);

/// Carathéodory pruning of an l1 solution. Walks along null-space directions of
/// H restricted to the support (orthogonal to the sign pattern) until a
/// coefficient vanishes, repeating while |support| > rank(H_support). Preserves
/// H s and ||s||_1. Simultaneous hits drop the lowest index.
LpSolution prune_to_extreme(const LpSolution& solution, const Matrix& h);

}  // namespace banrep::lp
