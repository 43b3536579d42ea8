#include "banrep/gtv.hpp"

#include "banrep/core/errors.hpp"
#include "banrep/lp.hpp"
#include "banrep/simd/kernels.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>

namespace banrep::gtv {

OperatorSpec OperatorSpec::from_frequency_response(Profile l_hat) {
    OperatorSpec s;
    s.kind = OperatorKind::frequency_response;
    s.frequency_response = std::move(l_hat);
    return s;
}

OperatorSpec OperatorSpec::super_exponential(double alpha, Index dimension) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw AdmissibilityError("super-exponential kernel needs 0 < alpha < 2, got " + std::to_string(alpha));
    }
    if (dimension < 1) throw ValidationError("kernel dimension must be positive");
    OperatorSpec s;
    s.kind = OperatorKind::super_exponential;
    s.alpha = alpha;
    s.dimension = dimension;
    return s;
}

OperatorSpec OperatorSpec::direct(Profile h, Index dimension) {
    if (dimension < 1) throw ValidationError("kernel dimension must be positive");
    OperatorSpec s;
    s.kind = OperatorKind::direct_kernel;
    s.kernel = std::move(h);
    s.dimension = dimension;
    return s;
}

double SampledKernel::radial(double r) const {
    r = std::abs(r);
    if (profile) return profile(r);
    const Index n = (samples.size() - 1) / 2;
    const double t = r / spacing;
    if (t >= static_cast<double>(n)) return t == static_cast<double>(n) ? samples[2 * n] : 0.0;
    const auto i = static_cast<Index>(t);
    const double w = t - static_cast<double>(i);
    return (1.0 - w) * samples[n + i] + w * samples[n + i + 1];
}

double SampledKernel::operator()(std::span<const double> x) const {
    if (static_cast<Index>(x.size()) != dimension) throw DimensionError("kernel argument", dimension, x.size());
    if (x.size() == 1) return radial(x[0]);
    return radial(std::sqrt(simd::sum_squares(x)));
}

double SampledKernel::width() const {
    const Index n = (samples.size() - 1) / 2;
    const double h0 = samples[n];
    for (Index i = 0; i <= n; ++i) {
        if (std::abs(samples[n + i]) <= std::abs(h0) / std::numbers::e) return static_cast<double>(i) * spacing;
    }
    return extent;
}

namespace {

struct FftwFree {
    void operator()(double* p) const { fftw_free(p); }
};

void check_grid(const KernelGrid& grid) {
    if (!(grid.spacing > 0.0) || !(grid.extent > grid.spacing) || !std::isfinite(grid.extent)) {
        throw ValidationError("kernel grid needs 0 < spacing < extent");
    }
}

double band_edge(const Profile& l_hat) {
    auto small = [&](double w) { return std::abs(1.0 / l_hat(w)) <= kBandTolerance; };
    double hi = 1.0;
    while (!small(hi)) {
        hi *= 2.0;
        if (hi > 1e9) throw AdmissibilityError("1 / L^ does not decay to the band tolerance");
    }
    double lo = hi / 2.0;
    if (!small(lo)) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (small(mid) ? hi : lo) = mid;
        }
    }
    return hi;
}

SampledKernel from_frequency_response(const OperatorSpec& spec, const KernelGrid& grid) {
    if (!spec.frequency_response) throw ValidationError("frequency response is empty");
    if (spec.dimension != 1) throw ValidationError("frequency-response kernels are one-dimensional");
    const auto n = static_cast<Index>(std::llround(grid.extent / grid.spacing));
    const double extent = static_cast<double>(n) * grid.spacing;
    const double band = band_edge(spec.frequency_response);

    // Internal spacing spacing / k has Nyquist frequency pi k / spacing >= band.
    const auto k = std::max<Index>(1, static_cast<Index>(std::ceil(band * grid.spacing / std::numbers::pi)));
    const Index fine = n * k;
    if (fine > (Index{1} << 24)) throw NumericError("frequency band too wide for the kernel grid");
    const double d_omega = std::numbers::pi / extent;

    const auto len = static_cast<std::size_t>(fine + 1);
    std::unique_ptr<double, FftwFree> in(fftw_alloc_real(len));
    std::unique_ptr<double, FftwFree> out(fftw_alloc_real(len));
    for (Index j = 0; j <= fine; ++j) {
        const double l = spec.frequency_response(static_cast<double>(j) * d_omega);
        if (!std::isfinite(l) || l == 0.0) throw AdmissibilityError("frequency response vanishes on the band");
        in.get()[j] = 1.0 / l;
    }
    fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(len), in.get(), out.get(), FFTW_REDFT00, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    SampledKernel kern;
    kern.kind = OperatorKind::frequency_response;
    kern.dimension = 1;
    kern.spacing = grid.spacing;
    kern.extent = extent;
    kern.band_limit = static_cast<double>(fine) * d_omega;
    kern.frequency_spacing = d_omega;
    kern.samples.resize(2 * n + 1);
    // Trapezoid rule on [0, band] for (1/pi) int 1/L^(w) cos(w x) dw.
    const double scale = d_omega / (2.0 * std::numbers::pi);
    for (Index i = 0; i <= n; ++i) {
        const double h = scale * out.get()[i * k];
        kern.samples[n + i] = h;
        kern.samples[n - i] = h;
    }
    return kern;
}

SampledKernel from_profile(OperatorKind kind, Profile profile, Index dimension, const KernelGrid& grid) {
    const auto n = static_cast<Index>(std::llround(grid.extent / grid.spacing));
    SampledKernel kern;
    kern.kind = kind;
    kern.dimension = dimension;
    kern.spacing = grid.spacing;
    kern.extent = static_cast<double>(n) * grid.spacing;
    kern.samples.resize(2 * n + 1);
    for (Index i = 0; i <= n; ++i) {
        const double h = profile(static_cast<double>(i) * grid.spacing);
        if (!std::isfinite(h)) throw ValidationError("kernel is not finite on the grid");
        kern.samples[n + i] = h;
        kern.samples[n - i] = h;
    }
    kern.profile = std::move(profile);
    return kern;
}

}  // namespace

SampledKernel kernel_from_operator(const OperatorSpec& spec, const KernelGrid& grid) {
    check_grid(grid);
    SampledKernel kern;
    switch (spec.kind) {
        case OperatorKind::frequency_response:
            kern = from_frequency_response(spec, grid);
            break;
        case OperatorKind::super_exponential: {
            if (!(spec.alpha > 0.0 && spec.alpha < 2.0)) {
                throw AdmissibilityError("super-exponential kernel needs 0 < alpha < 2, got " + std::to_string(spec.alpha));
            }
            const double alpha = spec.alpha;
            kern = from_profile(spec.kind, [alpha](double r) { return std::exp(-std::pow(r, alpha)); }, spec.dimension,
                                grid);
            break;
        }
        case OperatorKind::direct_kernel:
            if (!spec.kernel) throw ValidationError("direct kernel is empty");
            kern = from_profile(spec.kind, spec.kernel, spec.dimension, grid);
            break;
    }
    const Index n = (kern.samples.size() - 1) / 2;
    const double h0 = std::abs(kern.samples[n]);
    if (!(h0 > 0.0)) throw AdmissibilityError("kernel vanishes at the origin");
    if (std::abs(kern.samples[2 * n]) > kDecayTolerance * h0) {
        throw ValidationError("kernel has not decayed at the grid extent; enlarge the grid");
    }
    return kern;
}

double infer_frequency_response(const SampledKernel& kernel, double omega) {
    if (kernel.dimension != 1) throw ValidationError("frequency response inference is one-dimensional");
    const Index n = (kernel.samples.size() - 1) / 2;
    double acc = 0.5 * kernel.samples[n];
    for (Index i = 1; i < n; ++i) acc += kernel.samples[n + i] * std::cos(omega * static_cast<double>(i) * kernel.spacing);
    acc += 0.5 * kernel.samples[2 * n] * std::cos(omega * static_cast<double>(n) * kernel.spacing);
    const double h_hat = 2.0 * kernel.spacing * acc;
    if (h_hat == 0.0) throw NumericError("kernel transform vanishes");
    return 1.0 / h_hat;
}

Points default_center_grid(const Points& sites, const SampledKernel& kernel, Index per_axis, double pad_widths) {
    if (sites.rows() == 0) throw ValidationError("no data sites");
    if (per_axis < 1) throw ValidationError("center grid needs at least one candidate per axis");
    const Index d = sites.cols();
    if (d != 1 && d != 2) throw ValidationError("center grids are built for d in {1, 2}");
    const double pad = pad_widths * kernel.width();
    std::vector<Vector> axes;
    for (Index c = 0; c < d; ++c) {
        const double lo = sites.col(c).minCoeff() - pad;
        const double hi = sites.col(c).maxCoeff() + pad;
        axes.push_back(per_axis == 1 ? Vector(Vector::Constant(1, 0.5 * (lo + hi))) : Vector(Vector::LinSpaced(per_axis, lo, hi)));
    }
    if (d == 1) {
        Points g(per_axis, 1);
        g.col(0) = axes[0];
        return g;
    }
    Points g(per_axis * per_axis, 2);
    for (Index i = 0; i < per_axis; ++i) {
        for (Index j = 0; j < per_axis; ++j) {
            g(i * per_axis + j, 0) = axes[0][i];
            g(i * per_axis + j, 1) = axes[1][j];
        }
    }
    return g;
}

Matrix dictionary(const SampledKernel& kernel, const Points& sites, const Points& centers) {
    if (sites.cols() != kernel.dimension) throw DimensionError("site dimension", kernel.dimension, sites.cols());
    if (centers.cols() != kernel.dimension) throw DimensionError("center dimension", kernel.dimension, centers.cols());
    Matrix dict(sites.rows(), centers.rows());
    Vector diff(kernel.dimension);
    for (Index j = 0; j < centers.rows(); ++j) {
        for (Index m = 0; m < sites.rows(); ++m) {
            for (Index c = 0; c < kernel.dimension; ++c) diff[c] = sites(m, c) - centers(j, c);
            dict(m, j) = kernel(as_span(diff));
        }
    }
    return dict;
}

GtvFit gtv_fit(const Points& sites, const Vector& y, const SampledKernel& kernel, const Points& centers, double lambda,
               const Loss& loss, const GtvOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("gTV fit needs lambda > 0");
    if (loss.is_equality()) throw ValidationError("gTV fit needs a quadratic or huber loss");
    if (sites.rows() != y.size()) throw DimensionError("data sites vs values", y.size(), sites.rows());
    if (centers.rows() == 0) throw ValidationError("empty center grid");

    GtvFit fit;
    fit.model.kernel = kernel;
    fit.model.centers.resize(0, kernel.dimension);
    SolveReport& rep = fit.report;
    const Matrix dict = dictionary(kernel, sites, centers);
    const Vector zero = Vector::Zero(y.size());

    if (y.cwiseAbs().maxCoeff() == 0.0) {
        rep.objective = loss.evaluate(y, zero);
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return fit;
    }
    const Vector corr = dict.transpose() * (-loss.gradient(y, zero));
    if (corr.cwiseAbs().maxCoeff() <= lambda) {
        rep.notes.push_back("warning: no candidate center correlates with the data above lambda; "
                            "the center grid may be too coarse");
    }

    lp::LpOptions lopt;
    lopt.tolerance = options.tolerance;
    lopt.max_fista_iterations = options.max_iterations;
    const lp::LpResult sol = lp::lp_primal_solve(dict, y, lambda, 1.0, loss, lopt);
    for (const auto& n : sol.report.notes) rep.notes.push_back(n);

    std::vector<Index> active;
    for (Index j = 0; j < dict.cols(); ++j) {
        if (sol.solution.s[j] != 0.0) active.push_back(j);
    }
    Matrix d_active(dict.rows(), static_cast<Index>(active.size()));
    lp::LpSolution act;
    act.p = 1.0;
    act.s.resize(static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
        d_active.col(static_cast<Index>(k)) = dict.col(active[k]);
        act.s[static_cast<Index>(k)] = sol.solution.s[active[k]];
    }
    if (!active.empty()) act = lp::prune_to_extreme(act, d_active);

    Vector full = Vector::Zero(dict.cols());
    std::vector<Index> kept;
    for (std::size_t k = 0; k < active.size(); ++k) {
        const double a = act.s[static_cast<Index>(k)];
        if (a != 0.0) {
            kept.push_back(active[k]);
            full[active[k]] = a;
        }
    }
    if (kept.size() < active.size()) rep.notes.push_back("active centers pruned to an extreme point");
    fit.model.centers.resize(static_cast<Index>(kept.size()), kernel.dimension);
    fit.model.coefficients.resize(static_cast<Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        fit.model.centers.row(static_cast<Index>(k)) = centers.row(kept[k]);
        fit.model.coefficients[static_cast<Index>(k)] = full[kept[k]];
    }
    fit.model.reg_cost = 0.0;
    for (Index k = 0; k < fit.model.size(); ++k) fit.model.reg_cost += std::abs(fit.model.coefficients[k]);

    rep.objective = loss.evaluate(y, dict * full) + lambda * fit.model.reg_cost;
    rep.iterations = sol.report.iterations;
    rep.optimality_residual = lp::stationarity_residual(dict, y, lambda, 1.0, loss, full);
    rep.support_size = kept.size();
    rep.converged = sol.report.converged;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return fit;
}

double gtv_predict(const GtvModel& model, std::span<const double> x) {
    const Index d = model.kernel.dimension;
    if (static_cast<Index>(x.size()) != d) throw DimensionError("prediction site", d, x.size());
    Vector diff(d);
    double acc = 0.0;
    for (Index k = 0; k < model.size(); ++k) {
        for (Index c = 0; c < d; ++c) diff[c] = x[c] - model.centers(k, c);
        acc += model.coefficients[k] * model.kernel(as_span(diff));
    }
    return acc;
}

}  // namespace banrep::gtv
