#include "banrep/measures.hpp"

#include "banrep/core/errors.hpp"
#include "banrep/core/linalg.hpp"
#include "banrep/lp.hpp"
#include "banrep/simd/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace banrep::measures {

double SpikeTrain::tv_norm() const { return simd::sum_abs(as_span(amplitudes)); }

Index default_cells(Index dimension) { return dimension == 1 ? 512 : 128; }

Vector grid_spacing(const Box& domain, Index cells) {
    return (domain.upper - domain.lower) / static_cast<double>(cells);
}

Vector forward(const AtomSet& atoms, const SpikeTrain& train) {
    if (train.amplitudes.size() != train.positions.rows()) {
        throw DimensionError("spike amplitudes vs positions", train.positions.rows(), train.amplitudes.size());
    }
    Vector z = Vector::Zero(atoms.size());
    Vector col(atoms.size());
    for (Index k = 0; k < train.size(); ++k) {
        atoms.evaluate(site(train.positions, k), as_span(col));
        simd::axpy(train.amplitudes[k], as_span(col), as_span(z));
    }
    return z;
}

double spike_objective(const AtomSet& atoms, const Vector& y, double lambda, const SpikeTrain& train) {
    if (y.size() != atoms.size()) throw DimensionError("spike data", atoms.size(), y.size());
    return (y - forward(atoms, train)).squaredNorm() + lambda * train.tv_norm();
}

Vector loss_residual(const AtomSet& atoms, const Vector& y, const SpikeTrain& train) {
    if (y.size() != atoms.size()) throw DimensionError("spike data", atoms.size(), y.size());
    return 2.0 * (y - forward(atoms, train));
}

CertificateGrid::CertificateGrid(const AtomSet& atoms, Points grid) : sites_(std::move(grid)) {
    samples_ = atoms.sample(sites_);
}

Vector CertificateGrid::evaluate(const Vector& residual) const {
    if (residual.size() != samples_.cols()) throw DimensionError("certificate residual", samples_.cols(), residual.size());
    return linalg::apply(samples_, residual);
}

Vector certificate_grid(const Vector& residual, const AtomSet& atoms, const Points& grid) {
    return CertificateGrid(atoms, grid).evaluate(residual);
}

SpikeTrain merge_close(const SpikeTrain& train, const Vector& tolerance) {
    const Index k = train.size();
    const Index d = train.positions.cols();
    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        for (Index j = 0; j < d; ++j) {
            if (train.positions(a, j) != train.positions(b, j)) return train.positions(a, j) < train.positions(b, j);
        }
        return a < b;
    });

    std::vector<char> used(static_cast<std::size_t>(k), 0);
    std::vector<Vector> pos;
    std::vector<double> amp;
    for (Index oi = 0; oi < k; ++oi) {
        const Index i = order[static_cast<std::size_t>(oi)];
        if (used[static_cast<std::size_t>(i)]) continue;
        used[static_cast<std::size_t>(i)] = 1;
        double weight = std::abs(train.amplitudes[i]);
        Vector centroid = weight * train.positions.row(i).transpose();
        double total = train.amplitudes[i];
        Vector anchor = train.positions.row(i).transpose();
        for (Index oj = oi + 1; oj < k; ++oj) {
            const Index j = order[static_cast<std::size_t>(oj)];
            if (used[static_cast<std::size_t>(j)]) continue;
            bool close = true;
            for (Index c = 0; c < d; ++c) {
                if (std::abs(train.positions(j, c) - anchor[c]) > tolerance[c]) close = false;
            }
            if (!close) continue;
            used[static_cast<std::size_t>(j)] = 1;
            const double w = std::abs(train.amplitudes[j]);
            centroid += w * train.positions.row(j).transpose();
            weight += w;
            total += train.amplitudes[j];
        }
        if (total == 0.0 || weight == 0.0) continue;
        pos.push_back(centroid / weight);
        amp.push_back(total);
    }

    SpikeTrain out;
    out.domain = train.domain;
    out.positions.resize(static_cast<Index>(pos.size()), d);
    out.amplitudes.resize(static_cast<Index>(amp.size()));
    for (std::size_t i = 0; i < pos.size(); ++i) {
        out.positions.row(static_cast<Index>(i)) = pos[i].transpose();
        out.amplitudes[static_cast<Index>(i)] = amp[i];
    }
    return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sign_of(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

// Parameter layout: [a_1..a_K, x_1 (d entries), ..., x_K].
struct Jacobian {
    Matrix j;      // M x (K + K d), derivative of nu(train) w.r.t. the parameters
    Vector model;  // nu(train)
};

Jacobian model_jacobian(const AtomSet& atoms, const SpikeTrain& t) {
    const Index k = t.size();
    const Index d = t.positions.cols();
    const Index m = atoms.size();
    Jacobian out{Matrix::Zero(m, k + k * d), Vector::Zero(m)};
    for (Index i = 0; i < k; ++i) {
        const Vector col = atoms.evaluate(site(t.positions, i));
        out.model += t.amplitudes[i] * col;
        out.j.col(i) = col;
        const Matrix g = atoms.gradient(site(t.positions, i));
        for (Index c = 0; c < d; ++c) out.j.col(k + i * d + c) = t.amplitudes[i] * g.col(c);
    }
    return out;
}

Vector objective_gradient(const Jacobian& jac, const Vector& y, double lambda, const SpikeTrain& t) {
    const Vector r = y - jac.model;
    Vector g = -2.0 * jac.j.transpose() * r;
    for (Index i = 0; i < t.size(); ++i) g[i] += lambda * sign_of(t.amplitudes[i]);
    return g;
}

}  // namespace

RefineResult refine_positions(const SpikeTrain& train, const AtomSet& atoms, const Vector& y, double lambda,
                              const RefineOptions& options) {
    if (y.size() != atoms.size()) throw DimensionError("spike data", atoms.size(), y.size());
    RefineResult res;
    res.train = train;
    res.objective_before = spike_objective(atoms, y, lambda, train);
    res.objective_after = res.objective_before;
    if (!atoms.differentiable()) {
        res.notes.push_back(std::string("refinement skipped: ") + std::string(atom_kind_name(atoms.kind())) +
                            " atoms are not differentiable");
        return res;
    }
    if (train.size() == 0) return res;

    const Index cells = options.cells > 0 ? options.cells : default_cells(atoms.dimension());
    const Vector merge_tol = options.merge_cells * grid_spacing(atoms.domain(), cells) * (1.0 + 1e-9);
    const double gtol = options.gradient_tolerance * std::max(1.0, y.norm());

    SpikeTrain cur = merge_close(train, merge_tol);
    double f = spike_objective(atoms, y, lambda, cur);
    const Index k = cur.size();
    const Index d = cur.positions.cols();
    const Index np = k + k * d;
    double mu = 1e-6;
    std::size_t it = 0;
    for (; it < options.max_iterations && k > 0; ++it) {
        const Jacobian jac = model_jacobian(atoms, cur);
        const Vector grad = objective_gradient(jac, y, lambda, cur);
        if (grad.cwiseAbs().maxCoeff() <= gtol) break;
        const Matrix jtj = 2.0 * jac.j.transpose() * jac.j;
        const double diag_scale = std::max(1e-300, jtj.diagonal().maxCoeff());
        bool accepted = false;
        while (mu < 1e12) {
            Matrix sys = jtj;
            for (Index i = 0; i < np; ++i) sys(i, i) += mu * (jtj(i, i) + 1e-12 * diag_scale);
            const Vector step = -sys.ldlt().solve(grad);
            if (!step.allFinite()) {
                mu *= 10.0;
                continue;
            }
            SpikeTrain trial = cur;
            bool signs_ok = true;
            for (Index i = 0; i < k; ++i) {
                trial.amplitudes[i] += step[i];
                if (sign_of(trial.amplitudes[i]) != sign_of(cur.amplitudes[i])) signs_ok = false;
                for (Index c = 0; c < d; ++c) trial.positions(i, c) += step[k + i * d + c];
                std::span<double> row{trial.positions.data() + i * d, static_cast<std::size_t>(d)};
                atoms.domain().clamp(row);
            }
            const double f_trial = signs_ok ? spike_objective(atoms, y, lambda, trial) : f + 1.0;
            if (signs_ok && f_trial < f) {
                cur = std::move(trial);
                const bool tiny = f - f_trial <= 1e-15 * std::max(1.0, f);
                f = f_trial;
                mu = std::max(mu * 0.3, 1e-12);
                accepted = !tiny;
                break;
            }
            mu *= 10.0;
        }
        if (!accepted) break;
    }
    res.iterations = it;
    SpikeTrain merged = merge_close(cur, merge_tol);
    const double f_merged = spike_objective(atoms, y, lambda, merged);
    if (f_merged <= f) {
        cur = std::move(merged);
        f = f_merged;
    }
    if (f <= res.objective_before) {
        res.train = std::move(cur);
        res.objective_after = f;
        res.refined = true;
    } else {
        res.notes.push_back("refinement did not lower the objective; input kept");
    }
    return res;
}

SpikeSolveResult spike_solve(const AtomSet& atoms, const Vector& y, double lambda, const SpikeOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("spike recovery needs lambda > 0");
    if (y.size() != atoms.size()) throw DimensionError("spike data", atoms.size(), y.size());
    const Index cells = options.cells > 0 ? options.cells : default_cells(atoms.dimension());
    const CertificateGrid grid(atoms, uniform_grid(atoms.domain(), cells));
    if (grid.sites().rows() == 0) throw ValidationError("empty grid");

    const Matrix& samples = grid.samples();
    std::vector<Index> active;
    Vector amps;
    SpikeSolveResult out;
    SolveReport& rep = out.report;

    auto active_matrix = [&]() {
        Matrix d(atoms.size(), static_cast<Index>(active.size()));
        for (std::size_t k = 0; k < active.size(); ++k) d.col(static_cast<Index>(k)) = samples.row(active[k]).transpose();
        return d;
    };
    auto residual = [&]() {
        Vector z = Vector::Zero(atoms.size());
        for (std::size_t k = 0; k < active.size(); ++k) z += amps[static_cast<Index>(k)] * samples.row(active[k]).transpose();
        return Vector(2.0 * (y - z));
    };

    const double bound = lambda * (1.0 + options.certificate_tolerance);
    std::size_t additions = 0;
    std::size_t inner_iterations = 0;
    bool converged = false;
    double eta_max = 0.0;
    while (true) {
        const Vector eta = grid.evaluate(residual());
        const std::size_t j = simd::argmax_abs(as_span(eta));
        eta_max = std::abs(eta[static_cast<Index>(j)]);
        if (eta_max <= bound) {
            converged = true;
            break;
        }
        if (additions >= options.max_additions) break;
        if (std::find(active.begin(), active.end(), static_cast<Index>(j)) != active.end()) {
            rep.notes.push_back("certificate peak on an active site; amplitude refit is not accurate enough");
            break;
        }
        ++additions;
        active.push_back(static_cast<Index>(j));
        Vector warm = Vector::Zero(static_cast<Index>(active.size()));
        warm.head(amps.size()) = amps;
        lp::LpOptions lopt;
        lopt.initial = warm;
        const lp::LpResult fit = lp::lp_primal_solve(active_matrix(), y, lambda, 1.0, Loss::quadratic(), lopt);
        inner_iterations += fit.report.iterations;
        std::vector<Index> kept;
        std::vector<double> kept_amp;
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (fit.solution.s[static_cast<Index>(k)] != 0.0) {
                kept.push_back(active[k]);
                kept_amp.push_back(fit.solution.s[static_cast<Index>(k)]);
            }
        }
        active.swap(kept);
        amps = Eigen::Map<const Vector>(kept_amp.data(), static_cast<Index>(kept_amp.size()));
    }

    if (static_cast<Index>(active.size()) > atoms.size() || (!active.empty() && linalg::numerical_rank(active_matrix()) < static_cast<Index>(active.size()))) {
        lp::LpSolution sol;
        sol.s = amps;
        sol.p = 1.0;
        const lp::LpSolution pruned = lp::prune_to_extreme(sol, active_matrix());
        std::vector<Index> kept;
        std::vector<double> kept_amp;
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (pruned.s[static_cast<Index>(k)] != 0.0) {
                kept.push_back(active[k]);
                kept_amp.push_back(pruned.s[static_cast<Index>(k)]);
            }
        }
        active.swap(kept);
        amps = Eigen::Map<const Vector>(kept_amp.data(), static_cast<Index>(kept_amp.size()));
        rep.notes.push_back("active system pruned to an extreme point");
    }

    SpikeTrain& gt = out.grid_train;
    gt.domain = atoms.domain();
    gt.positions.resize(static_cast<Index>(active.size()), atoms.dimension());
    gt.amplitudes = amps;
    for (std::size_t k = 0; k < active.size(); ++k) gt.positions.row(static_cast<Index>(k)) = grid.sites().row(active[k]);
    out.grid_objective = spike_objective(atoms, y, lambda, gt);
    out.certificate_max = grid.evaluate(loss_residual(atoms, y, gt)).cwiseAbs().maxCoeff();
    out.train = gt;
    double objective = out.grid_objective;

    if (options.refine && gt.size() > 0) {
        RefineOptions ropt;
        ropt.cells = cells;
        RefineResult rr = refine_positions(gt, atoms, y, lambda, ropt);
        for (auto& n : rr.notes) rep.notes.push_back(std::move(n));
        inner_iterations += rr.iterations;
        if (rr.objective_after <= out.grid_objective) {
            out.train = std::move(rr.train);
            objective = rr.objective_after;
        }
    }

    rep.objective = objective;
    rep.iterations = additions;
    rep.optimality_residual = std::max(0.0, out.certificate_max - lambda);
    rep.support_size = static_cast<std::size_t>(out.train.size());
    rep.converged = converged;
    if (!converged) rep.notes.push_back("stopped before the certificate bound was met");
    rep.notes.push_back("inner iterations: " + std::to_string(inner_iterations));
    rep.wall_time = seconds_since(t0);
    return out;
}

}  // namespace banrep::measures
