#pragma once

// Slow reference solvers and checkers for tests. Nothing here is called from
// the production solvers, and nothing here calls them.

#include "banrep/core/types.hpp"

#include <functional>
#include <string>

namespace banrep::oracle {

struct OracleResult {
    Vector minimizer;
    double objective = 0.0;
    std::size_t iterations = 0;
    std::string method;
};

using Objective = std::function<double(const Vector&)>;
using Subgradient = std::function<Vector(const Vector&)>;

struct SubgradientOptions {
    std::size_t iterations = 100000;
    /// c in the step c / sqrt(k); roughly 1 / L for a smooth objective.
    double step = 1.0;
    /// The step counter k restarts from the best point every `epoch` iterations,
    /// with c multiplied by `decay`.
    std::size_t epoch = 2000;
    double decay = 0.85;
};

/// Diminishing-step subgradient method; returns the best iterate seen.
OracleResult subgradient_minimize(const Objective& f, const Subgradient& g, const Vector& x0,
                                  const SubgradientOptions& options = {});

inline constexpr Index kMaxEnumerationColumns = 12;

/// Global minimizer of ||y - H x||^2 + lambda ||x||_1 by enumerating every support
/// of size <= max_support and every sign pattern on it. N <= 12.
OracleResult enumerate_support_solve(const Matrix& h, const Vector& y, double lambda, Index max_support);

/// Central differences, one coordinate at a time.
Vector finite_diff_grad(const Objective& f, const Vector& x, double step = 1e-5);

// Loop-based reference formulas, written independently of the library.

enum class DataTerm { quadratic, huber };

double reference_loss(DataTerm kind, double delta, const Vector& y, const Vector& z);
Vector reference_loss_subgradient(DataTerm kind, double delta, const Vector& y, const Vector& z);

/// E(y, H x) + lambda ||x||_p^psi.
double reference_dense_objective(const Matrix& h, const Vector& y, double lambda, double p, double psi, DataTerm kind,
                                 double delta, const Vector& x);

/// Objective and subgradient of E(y, H x) + lambda ||x||_p^p.
std::pair<Objective, Subgradient> lp_problem(const Matrix& h, const Vector& y, double lambda, double p,
                                              DataTerm kind = DataTerm::quadratic, double delta = 1.0);

/// Objective and subgradient of E(y, G a) + lambda a^T G a.
std::pair<Objective, Subgradient> rkhs_problem(const Matrix& g, const Vector& y, double lambda,
                                                DataTerm kind = DataTerm::quadratic, double delta = 1.0);

/// Largest eigenvalue of A^T A by power iteration.
double gram_spectral_bound(const Matrix& a);

}  // namespace banrep::oracle
