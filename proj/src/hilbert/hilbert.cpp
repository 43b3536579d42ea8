#include "banrep/hilbert.hpp"

#include "banrep/core/errors.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace banrep::hilbert {
namespace {

double distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive and finite");
}

}  // namespace

Kernel Kernel::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("gaussian kernel needs sigma > 0");
    return Kernel(KernelKind::gaussian, sigma, 0);
}

Kernel Kernel::laplacian(double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("laplacian kernel needs sigma > 0");
    return Kernel(KernelKind::laplacian, sigma, 0);
}

Kernel Kernel::polynomial(int degree, double offset) {
    if (degree < 1) throw ValidationError("polynomial kernel needs degree >= 1");
    if (offset < 0.0) throw ValidationError("polynomial kernel needs offset >= 0");
    return Kernel(KernelKind::polynomial, offset, degree);
}

Kernel Kernel::super_exponential(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0)) throw ValidationError("super-exponential kernel needs 0 < alpha < 2");
    return Kernel(KernelKind::super_exponential, alpha, 0);
}

std::string Kernel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case KernelKind::gaussian: os << "gaussian(sigma=" << param_ << ")"; break;
        case KernelKind::laplacian: os << "laplacian(sigma=" << param_ << ")"; break;
        case KernelKind::polynomial: os << "polynomial(degree=" << degree_ << ", offset=" << param_ << ")"; break;
        case KernelKind::super_exponential: os << "super-exponential(alpha=" << param_ << ")"; break;
    }
    return os.str();
}

double Kernel::operator()(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != y.size()) throw DimensionError("kernel arguments", x.size(), y.size());
    switch (kind_) {
        case KernelKind::gaussian: {
            const double r = distance(x, y);
            return std::exp(-0.5 * r * r / (param_ * param_));
        }
        case KernelKind::laplacian: return std::exp(-distance(x, y) / param_);
        case KernelKind::polynomial: {
            double s = param_;
            for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
            return std::pow(s, degree_);
        }
        case KernelKind::super_exponential: return std::exp(-std::pow(distance(x, y), param_));
    }
    return 0.0;
}

KernelFn Kernel::function() const {
    return [k = *this](std::span<const double> x, std::span<const double> y) { return k(x, y); };
}

Matrix gram_matrix(const Kernel& kernel, const Points& points) {
    const Index m = points.rows();
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < i; ++j) {
            const double scale = std::max({1.0, points.row(i).norm(), points.row(j).norm()});
            if (distance(site(points, i), site(points, j)) <= kDuplicateTolerance * scale) {
                throw DuplicateSite(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
            }
        }
    }
    Matrix g(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j <= i; ++j) {
            const double v = kernel(site(points, i), site(points, j));
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

namespace {

// Closed form (G + lambda I)^{-1} y; LDLT covers Gram matrices that are
// numerically slightly indefinite.
Vector ridge_solve(const Matrix& g, const Vector& y, double lambda) {
    const Matrix a = g + lambda * Matrix::Identity(g.rows(), g.cols());
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) {
        Vector x = llt.solve(y);
        x += llt.solve(Vector(y - a * x));
        return x;
    }
    Eigen::LDLT<Matrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw NumericError("G + lambda I could not be factorized");
    Vector x = ldlt.solve(y);
    x += ldlt.solve(Vector(y - a * x));
    return x;
}

double rkhs_objective(const Loss& loss, const Matrix& g, const Vector& y, const Vector& a, double lambda) {
    const Vector ga = g * a;
    return loss.evaluate(y, ga) + lambda * a.dot(ga);
}

}  // namespace

RkhsFit rkhs_fit(const Kernel& kernel, const Points& points, const Vector& y, double lambda, const Loss& loss,
                 const RkhsOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (y.size() != points.rows()) throw DimensionError("rkhs data", points.rows(), y.size());
    if (points.rows() < 1) throw ValidationError("rkhs fit needs at least one data point");
    const bool interpolate = loss.is_equality();
    if (!interpolate) check_lambda(lambda);
    else if (lambda < 0.0) throw ValidationError("lambda must be non-negative");

    const Matrix g = gram_matrix(kernel, points);
    RkhsFit fit{KernelModel{kernel, points, Vector::Zero(points.rows())}, {}};
    SolveReport& rep = fit.report;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
    const double emax = eig.eigenvalues().maxCoeff();
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, emax)) {
        rep.notes.push_back("conditioning warning: Gram matrix is numerically indefinite");
    }

    Vector& a = fit.model.coefficients;
    if (interpolate) {
        double lam = lambda > 0.0 ? lambda : 1.0;
        std::size_t steps = 0;
        while (true) {
            a = ridge_solve(g, y, lam);
            ++steps;
            if (lam <= options.continuation_floor) break;
            lam = std::max(lam * options.continuation_factor, options.continuation_floor);
        }
        rep.iterations = steps;
        rep.objective = loss.evaluate(y, g * a);
        rep.optimality_residual = (g * a - y).norm();
        rep.converged = std::isfinite(rep.objective);
        rep.notes.push_back("interpolation by lambda continuation down to " + std::to_string(options.continuation_floor));
    } else if (loss.kind() == LossKind::quadratic) {
        a = ridge_solve(g, y, lambda);
        rep.iterations = 1;
        rep.objective = rkhs_objective(loss, g, y, a, lambda);
        rep.optimality_residual = (g * a + lambda * a - y).norm();
    } else {
        // Damped Newton on f(a) = E(y, G a) + lambda a^T G a.
        a = ridge_solve(g, y, lambda);
        double f = rkhs_objective(loss, g, y, a, lambda);
        std::size_t it = 0;
        double gnorm = 0.0;
        for (; it < options.max_iterations; ++it) {
            const Vector ga = g * a;
            const Vector grad = g * loss.gradient(y, ga) + 2.0 * lambda * ga;
            gnorm = grad.norm();
            if (gnorm <= options.gradient_tolerance) break;
            const Vector c = loss.curvature(y, ga);
            Matrix hess = g * c.asDiagonal() * g + 2.0 * lambda * g;
            hess += 1e-14 * std::max(1.0, hess.diagonal().maxCoeff()) * Matrix::Identity(g.rows(), g.cols());
            Vector step = -hess.ldlt().solve(grad);
            double slope = grad.dot(step);
            if (!(slope < 0.0) || !step.allFinite()) {
                step = -grad;
                slope = -gnorm * gnorm;
            }
            double t = 1.0;
            double f_new = rkhs_objective(loss, g, y, a + t * step, lambda);
            while (f_new > f + 1e-4 * t * slope && t > 1e-20) {
                t *= 0.5;
                f_new = rkhs_objective(loss, g, y, a + t * step, lambda);
            }
            if (!(f_new <= f)) break;
            a += t * step;
            const bool stalled = f - f_new <= 1e-16 * std::max(1.0, std::abs(f));
            f = f_new;
            if (stalled && t < 1.0) break;
        }
        const Vector ga = g * a;
        gnorm = (g * loss.gradient(y, ga) + 2.0 * lambda * ga).norm();
        rep.iterations = it;
        rep.objective = f;
        rep.optimality_residual = gnorm;
        rep.converged = gnorm <= std::max(options.gradient_tolerance, 1e-8 * std::max(1.0, y.norm()));
    }
    rep.support_size = static_cast<std::size_t>(points.rows());
    rep.wall_time = seconds_since(t0);
    return fit;
}

double rkhs_predict(const KernelModel& model, std::span<const double> x) {
    if (model.coefficients.size() != model.centers.rows()) {
        throw DimensionError("model coefficients vs centers", model.centers.rows(), model.coefficients.size());
    }
    if (static_cast<Index>(x.size()) != model.centers.cols()) throw DimensionError("prediction site", model.centers.cols(), x.size());
    double s = 0.0;
    for (Index m = 0; m < model.centers.rows(); ++m) s += model.coefficients[m] * model.kernel(x, site(model.centers, m));
    return s;
}

double rkhs_norm_squared(const KernelModel& model) {
    const Matrix g = gram_matrix(model.kernel, model.centers);
    return model.coefficients.dot(g * model.coefficients);
}

TikhonovFit tikhonov_fit(const Matrix& h, const Vector& y, double lambda) {
    const auto t0 = std::chrono::steady_clock::now();
    check_lambda(lambda);
    if (h.rows() != h.cols()) throw DimensionError("tikhonov system matrix must be square", h.rows(), h.cols());
    if (y.size() != h.rows()) throw DimensionError("tikhonov data", h.rows(), y.size());
    if (!h.allFinite() || !y.allFinite()) throw ValidationError("tikhonov inputs must be finite");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) throw ValidationError("tikhonov system matrix is not symmetric");

    const Matrix sys = h + lambda * Matrix::Identity(h.rows(), h.cols());
    Eigen::LLT<Matrix> llt(sys);
    if (llt.info() != Eigen::Success) throw NumericError("H + lambda I is not positive definite; H must be positive semi-definite");
    TikhonovFit fit{llt.solve(y), {}};
    fit.a += llt.solve(Vector(y - sys * fit.a));
    const Vector ha = h * fit.a;
    fit.report.objective = (y - ha).squaredNorm() + lambda * fit.a.dot(ha);
    fit.report.iterations = 1;
    fit.report.optimality_residual = (sys * fit.a - y).norm();
    fit.report.support_size = static_cast<std::size_t>(h.rows());
    fit.report.wall_time = seconds_since(t0);
    return fit;
}

}  // namespace banrep::hilbert
