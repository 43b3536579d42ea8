#pragma once

#include "banrep/core/atoms.hpp"
#include "banrep/core/loss.hpp"
#include "banrep/core/types.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace banrep {

/// Symmetric bivariate kernel k(x, y).
using KernelFn = std::function<double(std::span<const double>, std::span<const double>)>;

struct DenseOperator {
    Matrix matrix;  // M x N
};

struct PointEvaluation {
    Points sites;  // M x d
    Box domain;
};

struct ContinuousAtoms {
    AtomSet atoms;
    Points grid;  // used for rank checks
};

/// nu = (nu_1, ..., nu_M).
class MeasurementOperator {
 public:
    using Storage = std::variant<DenseOperator, PointEvaluation, ContinuousAtoms>;

    static MeasurementOperator dense(Matrix h) { return MeasurementOperator(DenseOperator{std::move(h)}); }
    static MeasurementOperator point_evaluation(Points sites, Box domain) {
        return MeasurementOperator(PointEvaluation{std::move(sites), std::move(domain)});
    }
    static MeasurementOperator atoms(AtomSet atoms, Points grid) {
        return MeasurementOperator(ContinuousAtoms{std::move(atoms), std::move(grid)});
    }

    Index count() const;
    const Storage& storage() const { return storage_; }

 private:
    explicit MeasurementOperator(Storage s) : storage_(std::move(s)) {}
    Storage storage_;
};

enum class NormKind { lp, tv_measure, gtv };

/// Regularizer lambda * ||f||^{psi_exponent}.
struct RegularizationSpec {
    NormKind norm = NormKind::lp;
    double p = 2.0;  // only for NormKind::lp
    double psi_exponent = 2.0;
    double lambda = 1.0;
};

struct ProblemSpec {
    MeasurementOperator op;
    Vector y;
    Loss loss = Loss::quadratic();
    RegularizationSpec reg;
};

// Candidate representations accepted by evaluate_objective.

struct CoefficientCandidate {
    Vector x;
};

struct KernelExpansionCandidate {
    KernelFn kernel;
    Points centers;
    Vector coefficients;
};

struct SpikeCandidate {
    Points positions;
    Vector amplitudes;
};

using Candidate = std::variant<CoefficientCandidate, KernelExpansionCandidate, SpikeCandidate>;

/// E(y, nu(f)) + lambda * ||f||^{psi_exponent}.
///
/// Supported pairings: dense operator with a coefficient vector (lp or l1-type norms),
/// point evaluation with a kernel expansion (Hilbert norm sqrt(a^T K a) for lp with
/// p = 2, or ||a||_1 for gtv), continuous atoms with a spike candidate (total variation).
double evaluate_objective(const ProblemSpec& problem, const Candidate& candidate);

/// nu(f) for the supported candidate pairings.
Vector measure_candidate(const ProblemSpec& problem, const Candidate& candidate);

struct ValidationReport {
    bool valid = true;
    bool independent = true;
    Index rank = 0;
    std::vector<std::string> issues;
};

/// Never throws; solvers refuse problems whose report is invalid.
ValidationReport validate_problem(const ProblemSpec& problem);

}  // namespace banrep
