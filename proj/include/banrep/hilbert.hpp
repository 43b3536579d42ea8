#pragma once

// Hilbertian reconstruction: kernel regression in an RKHS and Tikhonov-regularized
// linear inverse problems, both reduced to M x M linear algebra.

#include "banrep/core/loss.hpp"
#include "banrep/core/problem.hpp"
#include "banrep/core/types.hpp"

#include <string>

namespace banrep::hilbert {

enum class KernelKind { gaussian, laplacian, polynomial, super_exponential };

class Kernel {
 public:
    /// exp(-|x - y|^2 / (2 sigma^2))
    static Kernel gaussian(double sigma);
    /// exp(-|x - y| / sigma)
    static Kernel laplacian(double sigma);
    /// (x.y + offset)^degree
    static Kernel polynomial(int degree, double offset);
    /// exp(-|x - y|^alpha), 0 < alpha < 2
    static Kernel super_exponential(double alpha);

    KernelKind kind() const { return kind_; }
    double parameter() const { return param_; }
    int degree() const { return degree_; }
    std::string describe() const;

    double operator()(std::span<const double> x, std::span<const double> y) const;
    KernelFn function() const;

 private:
    Kernel(KernelKind k, double param, int degree) : kind_(k), param_(param), degree_(degree) {}
    KernelKind kind_;
    double param_;
    int degree_;
};

struct KernelModel {
    Kernel kernel;
    Points centers;
    Vector coefficients;
};

/// Sites closer than this (relative to their magnitude) are rejected as duplicates.
inline constexpr double kDuplicateTolerance = 1e-9;

/// G[m, n] = k(x_m, x_n). Throws DuplicateSite naming the first coincident pair.
Matrix gram_matrix(const Kernel& kernel, const Points& points);

struct RkhsOptions {
    double gradient_tolerance = 1e-10;
    std::size_t max_iterations = 500;
    /// Interpolation mode: lambda is driven down by this factor per step...
    double continuation_factor = 0.1;
    /// ...until it reaches this floor.
    double continuation_floor = 1e-8;
};

struct RkhsFit {
    KernelModel model;
    SolveReport report;
};

/// Minimizes E(y, G a) + lambda a^T G a over a in R^M.
///
/// Quadratic loss is solved in closed form, a = (G + lambda I)^{-1} y. The equality
/// loss (or lambda = 0) runs the closed form along a decreasing lambda sequence.
/// Huber uses damped Newton with Armijo backtracking.
RkhsFit rkhs_fit(const Kernel& kernel, const Points& points, const Vector& y, double lambda, const Loss& loss,
                 const RkhsOptions& options = {});

/// sum_m a_m k(x, x_m)
double rkhs_predict(const KernelModel& model, std::span<const double> x);

/// Regularizer value a^T G a of a fitted model (squared RKHS norm).
double rkhs_norm_squared(const KernelModel& model);

struct TikhonovFit {
    Vector a;
    SolveReport report;
};

/// a = (H + lambda I)^{-1} y for symmetric positive semi-definite H and lambda > 0.
/// The report carries ||(H + lambda I) a - y|| as its optimality residual.
TikhonovFit tikhonov_fit(const Matrix& h, const Vector& y, double lambda);

}  // namespace banrep::hilbert
