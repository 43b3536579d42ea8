#include "banrep/core/problem.hpp"

#include "banrep/core/errors.hpp"
#include "banrep/core/linalg.hpp"
#include "banrep/simd/kernels.hpp"

#include <cmath>
#include <sstream>

namespace banrep {

Index MeasurementOperator::count() const {
    return std::visit(
        [](const auto& op) -> Index {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, DenseOperator>) {
                return op.matrix.rows();
            } else if constexpr (std::is_same_v<T, PointEvaluation>) {
                return op.sites.rows();
            } else {
                return op.atoms.size();
            }
        },
        storage_);
}

namespace {

[[noreturn]] void incompatible(const char* what) {
    throw ValidationError(std::string("candidate does not match the measurement operator: ") + what);
}

Matrix kernel_matrix(const KernelFn& k, const Points& rows, const Points& cols) {
    if (rows.cols() != cols.cols()) throw DimensionError("kernel site dimension", rows.cols(), cols.cols());
    Matrix out(rows.rows(), cols.rows());
    for (Index i = 0; i < rows.rows(); ++i) {
        for (Index j = 0; j < cols.rows(); ++j) out(i, j) = k(site(rows, i), site(cols, j));
    }
    return out;
}

double regularizer_norm(const ProblemSpec& problem, const Candidate& candidate) {
    const RegularizationSpec& reg = problem.reg;
    if (const auto* c = std::get_if<CoefficientCandidate>(&candidate)) {
        if (reg.norm == NormKind::lp) return linalg::lp_norm(c->x, reg.p);
        return simd::sum_abs(as_span(c->x));
    }
    if (const auto* c = std::get_if<KernelExpansionCandidate>(&candidate)) {
        if (reg.norm == NormKind::gtv) return simd::sum_abs(as_span(c->coefficients));
        if (reg.norm == NormKind::lp && reg.p == 2.0) {
            const Matrix k = kernel_matrix(c->kernel, c->centers, c->centers);
            return std::sqrt(std::max(0.0, c->coefficients.dot(k * c->coefficients)));
        }
        incompatible("kernel expansions carry a Hilbert (lp, p = 2) or gtv norm");
    }
    const auto& s = std::get<SpikeCandidate>(candidate);
    if (reg.norm != NormKind::tv_measure) incompatible("spike trains carry the total-variation norm");
    return simd::sum_abs(as_span(s.amplitudes));
}

}  // namespace

Vector measure_candidate(const ProblemSpec& problem, const Candidate& candidate) {
    const auto& storage = problem.op.storage();
    if (const auto* c = std::get_if<CoefficientCandidate>(&candidate)) {
        const auto* op = std::get_if<DenseOperator>(&storage);
        if (op == nullptr) incompatible("coefficient vectors need a dense operator");
        if (c->x.size() != op->matrix.cols()) throw DimensionError("candidate vs operator columns", op->matrix.cols(), c->x.size());
        return linalg::apply(op->matrix, c->x);
    }
    if (const auto* c = std::get_if<KernelExpansionCandidate>(&candidate)) {
        const auto* op = std::get_if<PointEvaluation>(&storage);
        if (op == nullptr) incompatible("kernel expansions need a point-evaluation operator");
        if (!c->kernel) throw ValidationError("kernel expansion without a kernel");
        if (c->coefficients.size() != c->centers.rows()) {
            throw DimensionError("expansion coefficients vs centers", c->centers.rows(), c->coefficients.size());
        }
        if (c->centers.cols() != op->sites.cols()) throw DimensionError("center dimension", op->sites.cols(), c->centers.cols());
        return kernel_matrix(c->kernel, op->sites, c->centers) * c->coefficients;
    }
    const auto& s = std::get<SpikeCandidate>(candidate);
    const auto* op = std::get_if<ContinuousAtoms>(&storage);
    if (op == nullptr) incompatible("spike trains need continuous atoms");
    if (s.amplitudes.size() != s.positions.rows()) throw DimensionError("spike amplitudes vs positions", s.positions.rows(), s.amplitudes.size());
    if (s.positions.rows() > 0 && s.positions.cols() != op->atoms.dimension()) {
        throw DimensionError("spike position dimension", op->atoms.dimension(), s.positions.cols());
    }
    Vector z = Vector::Zero(op->atoms.size());
    Vector col(op->atoms.size());
    for (Index k = 0; k < s.positions.rows(); ++k) {
        op->atoms.evaluate(site(s.positions, k), as_span(col));
        z += s.amplitudes[k] * col;
    }
    return z;
}

double evaluate_objective(const ProblemSpec& problem, const Candidate& candidate) {
    const Vector z = measure_candidate(problem, candidate);
    if (z.size() != problem.y.size()) throw DimensionError("measurements vs data", problem.y.size(), z.size());
    const double data = problem.loss.evaluate(problem.y, z);
    if (problem.reg.lambda == 0.0) return data;
    const double norm = regularizer_norm(problem, candidate);
    return data + problem.reg.lambda * std::pow(norm, problem.reg.psi_exponent);
}

ValidationReport validate_problem(const ProblemSpec& problem) {
    ValidationReport report;
    auto fail = [&report](std::string msg) {
        report.valid = false;
        report.issues.push_back(std::move(msg));
    };

    const RegularizationSpec& reg = problem.reg;
    if (!std::isfinite(reg.lambda) || reg.lambda < 0.0) {
        fail("lambda must be finite and non-negative");
    } else if (reg.lambda == 0.0 && !problem.loss.is_equality()) {
        fail("lambda = 0 is only allowed with the equality-constraint loss");
    }
    if (!(reg.psi_exponent >= 1.0) || !std::isfinite(reg.psi_exponent)) fail("psi exponent must be >= 1");
    if (reg.norm == NormKind::lp && (!(reg.p >= 1.0) || !std::isfinite(reg.p))) fail("lp norm needs 1 <= p < inf");

    const Index m = problem.op.count();
    if (m < 1) fail("operator needs at least one functional");
    if (problem.y.size() != m) {
        std::ostringstream os;
        os << "data has " << problem.y.size() << " entries but the operator has " << m << " functionals";
        fail(os.str());
    }
    if (!problem.y.allFinite()) fail("data contains non-finite entries");

    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, DenseOperator>) {
                if (!op.matrix.allFinite()) {
                    fail("operator matrix contains non-finite entries");
                    report.independent = false;
                    return;
                }
                report.rank = linalg::numerical_rank(op.matrix);
                report.independent = report.rank == op.matrix.rows();
            } else if constexpr (std::is_same_v<T, PointEvaluation>) {
                report.rank = op.sites.rows();
                if (op.sites.cols() != op.domain.dimension()) {
                    fail("site dimension does not match the domain");
                    report.independent = false;
                    return;
                }
                for (Index i = 0; i < op.sites.rows(); ++i) {
                    if (!op.domain.contains(site(op.sites, i))) fail("site " + std::to_string(i) + " lies outside the domain");
                    for (Index j = 0; j < i; ++j) {
                        const double dist = (op.sites.row(i) - op.sites.row(j)).norm();
                        const double scale = std::max({1.0, op.sites.row(i).norm(), op.sites.row(j).norm()});
                        if (dist <= 1e-9 * scale) {
                            report.independent = false;
                            report.rank = std::min<Index>(report.rank, op.sites.rows() - 1);
                        }
                    }
                }
            } else {
                if (op.grid.rows() == 0) {
                    fail("atom operator needs a non-empty grid");
                    report.independent = false;
                    return;
                }
                report.rank = linalg::numerical_rank(op.atoms.sample(op.grid));
                report.independent = report.rank == op.atoms.size();
            }
        },
        problem.op.storage());

    if (!report.independent) report.issues.push_back("measurement functionals are linearly dependent");
    return report;
}

}  // namespace banrep
