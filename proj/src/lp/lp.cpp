#include "banrep/lp.hpp"

#include "banrep/core/errors.hpp"
#include "banrep/core/linalg.hpp"
#include "banrep/simd/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace banrep::lp {
namespace {

constexpr double kCurvatureCap = 1e100;

double sign_of(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

/// |t|^p, or the smoothed (t^2 + eps^2)^{p/2} - eps^p when eps > 0.
struct PowerPenalty {
    double p;
    double eps;

    double value(double t) const {
        if (eps == 0.0) return std::pow(std::abs(t), p);
        return std::pow(t * t + eps * eps, 0.5 * p) - std::pow(eps, p);
    }
    double first(double t) const {
        if (eps == 0.0) return t == 0.0 ? 0.0 : p * std::pow(std::abs(t), p - 1.0) * sign_of(t);
        return p * t * std::pow(t * t + eps * eps, 0.5 * p - 1.0);
    }
    double second(double t) const {
        if (eps == 0.0) {
            if (p == 2.0) return 2.0;
            if (t == 0.0) return p > 2.0 ? 0.0 : kCurvatureCap;
            return std::min(kCurvatureCap, p * (p - 1.0) * std::pow(std::abs(t), p - 2.0));
        }
        const double s = t * t + eps * eps;
        return p * std::pow(s, 0.5 * p - 2.0) * ((p - 1.0) * t * t + eps * eps);
    }
};

struct Problem {
    const Matrix& h;
    const Vector& y;
    double lambda;
    const Loss& loss;

    double objective(const Vector& x, const PowerPenalty& pen) const {
        double r = 0.0;
        for (Index n = 0; n < x.size(); ++n) r += pen.value(x[n]);
        return loss.evaluate(y, linalg::apply(h, x)) + lambda * r;
    }
    Vector gradient(const Vector& x, const PowerPenalty& pen) const {
        Vector g = linalg::apply_transpose(h, loss.gradient(y, linalg::apply(h, x)));
        for (Index n = 0; n < x.size(); ++n) g[n] += lambda * pen.first(x[n]);
        return g;
    }
};

// Damped Newton with Armijo backtracking. Near convergence objective
// differences drown in rounding, so a full step that shrinks the gradient is
// accepted even when the Armijo test cannot resolve it.
Vector newton_minimize(const Problem& prob, const PowerPenalty& pen, Vector x, double tol_abs, std::size_t max_iter,
                       std::size_t& iterations) {
    const Index n = x.size();
    double f = prob.objective(x, pen);
    Vector grad = prob.gradient(x, pen);
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double gnorm = grad.cwiseAbs().maxCoeff();
        if (gnorm <= tol_abs) break;
        ++iterations;
        const Vector z = linalg::apply(prob.h, x);
        const Vector c = prob.loss.curvature(prob.y, z);
        Matrix hess = prob.h.transpose() * c.asDiagonal() * prob.h;
        for (Index k = 0; k < n; ++k) hess(k, k) += prob.lambda * pen.second(x[k]);
        const double diag_max = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
        // Singular curvature (flat penalty at 0, saturated huber) is handled by
        // raising the diagonal shift until the line search accepts.
        bool accepted = false;
        Vector full_step;
        for (double shift = 1e-15; shift <= 1.0 && !accepted; shift *= 1e3) {
            Matrix damped = hess;
            damped.diagonal().array() += shift * diag_max;
            Vector step = -damped.ldlt().solve(grad);
            double slope = grad.dot(step);
            if (!step.allFinite() || !(slope < 0.0)) {
                step = -grad / diag_max;
                slope = grad.dot(step);
            }
            if (full_step.size() == 0) full_step = step;
            double t = 1.0;
            for (int half = 0; half < 30; ++half, t *= 0.5) {
                Vector trial = x + t * step;
                const double f_trial = prob.objective(trial, pen);
                if (f_trial <= f + 1e-4 * t * slope) {
                    x = std::move(trial);
                    f = f_trial;
                    accepted = true;
                    break;
                }
            }
        }
        if (accepted) {
            grad = prob.gradient(x, pen);
            continue;
        }
        const Vector trial = x + full_step;
        const Vector g_trial = prob.gradient(trial, pen);
        if (!(g_trial.cwiseAbs().maxCoeff() < gnorm)) break;
        x = trial;
        grad = g_trial;
        f = prob.objective(x, pen);
    }
    return x;
}

double spectral_norm_squared(const Matrix& h) {
    if (h.size() == 0) return 0.0;
    if (std::min(h.rows(), h.cols()) <= 64) {
        Eigen::JacobiSVD<Matrix> svd(h);
        const double s = svd.singularValues()[0];
        return s * s;
    }
    Vector v = Vector::Ones(h.cols()) / std::sqrt(static_cast<double>(h.cols()));
    double est = 0.0;
    for (int k = 0; k < 200; ++k) {
        Vector w = linalg::apply_transpose(h, linalg::apply(h, v));
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        if (std::abs(nw - est) <= 1e-10 * nw) {
            est = nw;
            break;
        }
        est = nw;
        v = w / nw;
    }
    return est;
}

Vector fista(const Problem& prob, Vector x, double tol_abs, std::size_t max_iter, std::size_t& iterations) {
    const double lip = 2.0 * spectral_norm_squared(prob.h) * 1.01;
    if (lip == 0.0) return Vector::Zero(x.size());
    const double step = 1.0 / lip;
    Vector v = x;
    Vector x_new(x.size());
    double t = 1.0;
    for (std::size_t k = 0; k < max_iter; ++k) {
        ++iterations;
        const Vector g = linalg::apply_transpose(prob.h, prob.loss.gradient(prob.y, linalg::apply(prob.h, v)));
        Vector u = v - step * g;
        simd::soft_threshold(as_span(u), step * prob.lambda, as_span(x_new));
        if ((v - x_new).dot(x_new - x) > 0.0) {
            t = 1.0;
            v = x_new;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            v = x_new + ((t - 1.0) / t_next) * (x_new - x);
            t = t_next;
        }
        x.swap(x_new);
        if (k % 25 == 24 && stationarity_residual(prob.h, prob.y, prob.lambda, 1.0, prob.loss, x) <= tol_abs) break;
    }
    return x;
}

// Quadratic-loss l1 objective with exact zeros handled by the caller.
double l1_objective(const Problem& prob, const Vector& x) {
    return prob.loss.evaluate(prob.y, linalg::apply(prob.h, x)) + prob.lambda * simd::sum_abs(as_span(x));
}

Matrix columns(const Matrix& h, const std::vector<Index>& idx) {
    Matrix out(h.rows(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = h.col(idx[k]);
    return out;
}

std::vector<Index> nonzeros(const Vector& x) {
    std::vector<Index> idx;
    for (Index n = 0; n < x.size(); ++n) {
        if (x[n] != 0.0) idx.push_back(n);
    }
    return idx;
}

// Walk along null directions of H_A (oriented so the l1 term does not grow)
// until H_A has full column rank. Zero entries in A move only along theta.
bool reduce_to_independent(const Matrix& h, Vector& x, std::vector<Index>& active, Vector& theta) {
    for (std::size_t guard = 0; guard < 4 * static_cast<std::size_t>(h.cols()) + 8; ++guard) {
        if (active.empty()) return true;
        const Matrix ha = columns(h, active);
        if (linalg::numerical_rank(ha) == static_cast<Index>(active.size())) return true;
        Vector d = linalg::null_vector(ha);
        if (d.size() == 0) return true;
        double td = 0.0;
        for (std::size_t k = 0; k < active.size(); ++k) td += theta[active[k]] * d[static_cast<Index>(k)];
        if (td > 0.0) d = -d;
        const double dmax = d.cwiseAbs().maxCoeff();
        double best = std::numeric_limits<double>::infinity();
        std::size_t hit = active.size();
        for (std::size_t k = 0; k < active.size(); ++k) {
            const Index n = active[k];
            const double dk = d[static_cast<Index>(k)];
            if (std::abs(dk) <= 1e-13 * dmax) continue;
            double alpha;
            if (x[n] == 0.0) {
                if (theta[n] * dk >= 0.0) continue;
                alpha = 0.0;
            } else {
                alpha = -x[n] / dk;
                if (alpha < 0.0) continue;
            }
            if (alpha < best) {
                best = alpha;
                hit = k;
            }
        }
        if (hit == active.size()) return false;
        for (std::size_t k = 0; k < active.size(); ++k) x[active[k]] += best * d[static_cast<Index>(k)];
        x[active[hit]] = 0.0;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(hit));
    }
    return false;
}

// Feature-sign search: exact l1 solver for the quadratic loss. Each step solves
// the sign-restricted least-squares problem on the active set and performs a
// discrete line search over the sign changes, so the objective never grows.
bool feature_sign(const Problem& prob, Vector& x, double tol_abs, std::size_t& iterations) {
    const Index n_cols = prob.h.cols();
    const double lambda = prob.lambda;
    Vector theta(n_cols);
    for (Index n = 0; n < n_cols; ++n) theta[n] = sign_of(x[n]);
    std::vector<Index> active = nonzeros(x);

    const std::size_t max_iter = 50 * static_cast<std::size_t>(n_cols) + 100;
    for (std::size_t it = 0; it < max_iter; ++it) {
        ++iterations;
        const Vector g = -linalg::apply_transpose(prob.h, prob.loss.gradient(prob.y, linalg::apply(prob.h, x)));
        bool active_ok = true;
        for (Index n : active) {
            if (std::abs(g[n] - lambda * theta[n]) > tol_abs) active_ok = false;
        }
        if (active_ok) {
            Index worst = -1;
            double worst_val = lambda + tol_abs;
            for (Index n = 0; n < n_cols; ++n) {
                if (x[n] != 0.0) continue;
                if (std::abs(g[n]) > worst_val) {
                    worst_val = std::abs(g[n]);
                    worst = n;
                }
            }
            if (worst < 0) return true;
            theta[worst] = sign_of(g[worst]);
            active.push_back(worst);
            std::sort(active.begin(), active.end());
        }
        if (!reduce_to_independent(prob.h, x, active, theta)) return false;
        if (active.empty()) continue;

        const Matrix ha = columns(prob.h, active);
        const Index k = static_cast<Index>(active.size());
        Vector rhs = ha.transpose() * prob.y;
        for (Index j = 0; j < k; ++j) rhs[j] -= 0.5 * lambda * theta[active[static_cast<std::size_t>(j)]];
        Eigen::HouseholderQR<Matrix> qr(ha);
        const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Vector w = r.transpose().triangularView<Eigen::Lower>().solve(rhs);
        const Vector xhat_a = r.triangularView<Eigen::Upper>().solve(w);
        if (!xhat_a.allFinite()) return false;

        Vector target = x;
        for (Index j = 0; j < k; ++j) target[active[static_cast<std::size_t>(j)]] = xhat_a[j];
        const Vector dir = target - x;
        std::vector<double> ts{1.0};
        for (Index n : active) {
            if (x[n] != 0.0 && target[n] != 0.0 && sign_of(x[n]) != sign_of(target[n])) ts.push_back(x[n] / (x[n] - target[n]));
        }
        const double f0 = l1_objective(prob, x);
        double best_f = std::numeric_limits<double>::infinity();
        double best_t = 1.0;
        Index best_zero = -1;
        for (double t : ts) {
            Vector cand = x + t * dir;
            Index zeroed = -1;
            if (t < 1.0) {
                for (Index n : active) {
                    if (x[n] != 0.0 && std::abs(x[n] / (x[n] - target[n]) - t) == 0.0) {
                        cand[n] = 0.0;
                        zeroed = n;
                    }
                }
            }
            const double f = l1_objective(prob, cand);
            if (f < best_f) {
                best_f = f;
                best_t = t;
                best_zero = zeroed;
            }
        }
        if (best_f > f0 + 1e-14 * std::max(1.0, std::abs(f0))) return false;
        x += best_t * dir;
        if (best_zero >= 0) x[best_zero] = 0.0;
        std::vector<Index> next;
        for (Index n : active) {
            if (x[n] != 0.0) {
                theta[n] = sign_of(x[n]);
                next.push_back(n);
            }
        }
        active.swap(next);
    }
    return false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double smoothed_power(double t, double p, double eps) { return PowerPenalty{p, eps}.value(t); }

double smoothed_power_derivative(double t, double p, double eps) { return PowerPenalty{p, eps}.first(t); }

Vector objective_gradient(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss, const Vector& x,
                          double eps) {
    if (!(p > 1.0)) throw UnsupportedExponent(p);
    if (h.cols() != x.size()) throw DimensionError("lp candidate", h.cols(), x.size());
    if (h.rows() != y.size()) throw DimensionError("lp data", h.rows(), y.size());
    return Problem{h, y, lambda, loss}.gradient(x, PowerPenalty{p, eps});
}

double stationarity_scale(const Matrix& h, const Vector& y, const Loss& loss) {
    const Vector g0 = linalg::apply_transpose(h, loss.gradient(y, Vector::Zero(h.rows())));
    return std::max(1.0, g0.size() > 0 ? g0.cwiseAbs().maxCoeff() : 0.0);
}

double lp_objective(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss, const Vector& x) {
    if (x.size() != h.cols()) throw DimensionError("lp candidate", h.cols(), x.size());
    const double norm = linalg::lp_norm(x, p);
    return loss.evaluate(y, linalg::apply(h, x)) + lambda * std::pow(norm, p);
}

double stationarity_residual(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss, const Vector& s) {
    if (s.size() != h.cols()) throw DimensionError("lp candidate", h.cols(), s.size());
    const Vector g = -linalg::apply_transpose(h, loss.gradient(y, linalg::apply(h, s)));
    double worst = 0.0;
    if (p > 1.0) {
        const PowerPenalty pen{p, 0.0};
        for (Index n = 0; n < s.size(); ++n) worst = std::max(worst, std::abs(lambda * pen.first(s[n]) - g[n]));
        return worst;
    }
    for (Index n = 0; n < s.size(); ++n) {
        const double v = s[n] != 0.0 ? std::abs(g[n] - lambda * sign_of(s[n])) : std::max(0.0, std::abs(g[n]) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

std::vector<Index> support_of(const Vector& s, double rel_threshold) {
    std::vector<Index> idx;
    if (s.size() == 0) return idx;
    const double cut = rel_threshold * s.cwiseAbs().maxCoeff();
    for (Index n = 0; n < s.size(); ++n) {
        if (std::abs(s[n]) > cut) idx.push_back(n);
    }
    return idx;
}

LpResult lp_primal_solve(const Matrix& h, const Vector& y, double lambda, double p, const Loss& loss, const LpOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(p >= 1.0) || !std::isfinite(p)) throw UnsupportedExponent(p);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lp solve needs lambda > 0");
    if (loss.is_equality()) throw ValidationError("lp solve supports quadratic and huber losses");
    if (y.size() != h.rows()) throw DimensionError("lp data", h.rows(), y.size());
    if (!h.allFinite() || !y.allFinite()) throw ValidationError("lp inputs must be finite");

    Vector x = Vector::Zero(h.cols());
    if (options.initial) {
        if (options.initial->size() != h.cols()) throw DimensionError("lp initial point", h.cols(), options.initial->size());
        x = *options.initial;
    }
    const Problem prob{h, y, lambda, loss};
    const double scale = stationarity_scale(h, y, loss);
    const double tol_abs = options.tolerance * scale;
    LpResult result;
    SolveReport& rep = result.report;
    std::size_t iterations = 0;

    if (p >= 2.0) {
        x = newton_minimize(prob, PowerPenalty{p, 0.0}, x, tol_abs, options.max_newton_iterations, iterations);
    } else if (p > 1.0) {
        for (double eps = 1e-2; eps >= 1e-10 * 0.999; eps *= 0.1) {
            x = newton_minimize(prob, PowerPenalty{p, eps}, x, tol_abs, options.max_newton_iterations, iterations);
        }
        x = newton_minimize(prob, PowerPenalty{p, 0.0}, x, tol_abs, options.max_newton_iterations, iterations);
        rep.notes.push_back("smoothing continuation 1e-2 -> 1e-10 followed by unsmoothed polish");
    } else {
        x = fista(prob, x, tol_abs, options.max_fista_iterations, iterations);
        if (options.polish && loss.kind() == LossKind::quadratic) {
            Vector polished = x;
            std::size_t fs_iters = 0;
            const bool ok = feature_sign(prob, polished, 1e-3 * tol_abs, fs_iters);
            iterations += fs_iters;
            if (ok || l1_objective(prob, polished) <= l1_objective(prob, x)) {
                x = std::move(polished);
            }
            if (!ok) rep.notes.push_back("active-set polish did not terminate; kept the best iterate");
        }
    }

    result.solution.s = x;
    result.solution.p = p;
    result.solution.support = support_of(x);
    rep.iterations = iterations;
    rep.objective = lp_objective(h, y, lambda, p, loss, x);
    rep.optimality_residual = stationarity_residual(h, y, lambda, p, loss, x);
    rep.support_size = result.solution.support.size();
    rep.converged = rep.optimality_residual <= tol_abs;
    if (!rep.converged) rep.notes.push_back("stationarity residual above tolerance");
    rep.wall_time = seconds_since(t0);
    return result;
}

Vector dual_certificate(const LpSolution& solution, const Matrix& h, const Vector& y, double lambda, const Loss& loss,
                        double max_relative_residual) {
    if (solution.s.size() != h.cols()) throw DimensionError("lp solution", h.cols(), solution.s.size());
    if (y.size() != h.rows()) throw DimensionError("lp data", h.rows(), y.size());
    const double residual = stationarity_residual(h, y, lambda, solution.p, loss, solution.s);
    const double limit = max_relative_residual * stationarity_scale(h, y, loss);
    if (!(residual <= limit)) {
        throw NumericError("solution is not stationary (residual " + std::to_string(residual) + " > " + std::to_string(limit) +
                           "); refusing to extract a certificate");
    }
    return -loss.gradient(y, linalg::apply(h, solution.s)) / (lambda * solution.p);
}

double certificate_residual(const Vector& s, const Matrix& h, const Vector& a, double p) {
    const Vector v = linalg::apply_transpose(h, a);
    if (v.size() != s.size()) throw DimensionError("certificate vs solution", s.size(), v.size());
    double worst = 0.0;
    for (Index n = 0; n < s.size(); ++n) {
        const double lhs = s[n] == 0.0 ? 0.0 : std::pow(std::abs(s[n]), p - 1.0) * sign_of(s[n]);
        worst = std::max(worst, std::abs(lhs - v[n]));
    }
    return worst;
}

Vector primal_from_certificate(const Matrix& h, const Vector& a, double p) {
    if (!(p > 1.0)) throw UnsupportedExponent(p);
    const double q = p / (p - 1.0);
    Vector v = linalg::apply_transpose(h, a);
    for (Index n = 0; n < v.size(); ++n) v[n] = v[n] == 0.0 ? 0.0 : std::pow(std::abs(v[n]), q - 1.0) * sign_of(v[n]);
    return v;
}

LpSolution prune_to_extreme(const LpSolution& solution, const Matrix& h) {
    if (solution.p != 1.0) throw ValidationError("pruning applies to l1 solutions");
    if (solution.s.size() != h.cols()) throw DimensionError("lp solution", h.cols(), solution.s.size());
    LpSolution out = solution;
    Vector& s = out.s;
    const double hscale = std::max(1e-300, h.cwiseAbs().maxCoeff());

    std::vector<Index> supp = nonzeros(s);
    for (std::size_t guard = 0; guard <= static_cast<std::size_t>(h.cols()); ++guard) {
        const Matrix hs = columns(h, supp);
        const Index rank = linalg::numerical_rank(hs);
        if (static_cast<Index>(supp.size()) <= rank) break;

        // Null directions of H_S that leave the l1 norm unchanged.
        Matrix stacked(h.rows() + 1, static_cast<Index>(supp.size()));
        stacked.topRows(h.rows()) = hs;
        for (std::size_t k = 0; k < supp.size(); ++k) stacked(h.rows(), static_cast<Index>(k)) = hscale * sign_of(s[supp[k]]);
        const Vector d = linalg::null_vector(stacked);
        if (d.size() == 0) {
            throw NumericError("no sign-consistent null direction on an oversized support: the input is not an l1 optimum "
                               "or the support is numerically rank deficient");
        }
        const double dmax = d.cwiseAbs().maxCoeff();
        double best = std::numeric_limits<double>::infinity();
        std::size_t hit = supp.size();
        for (std::size_t k = 0; k < supp.size(); ++k) {
            const double dk = d[static_cast<Index>(k)];
            if (std::abs(dk) <= 1e-12 * dmax) continue;
            const double alpha = -s[supp[k]] / dk;
            // Strict comparison with a relative band: the lowest index wins ties.
            if (std::abs(alpha) < std::abs(best) * (1.0 - 1e-12)) {
                best = alpha;
                hit = k;
            }
        }
        if (hit == supp.size()) throw NumericError("pruning direction has no usable component");
        const double smax = s.cwiseAbs().maxCoeff();
        for (std::size_t k = 0; k < supp.size(); ++k) s[supp[k]] += best * d[static_cast<Index>(k)];
        s[supp[hit]] = 0.0;
        for (Index n : supp) {
            if (std::abs(s[n]) <= 1e-14 * smax) s[n] = 0.0;
        }
        supp = nonzeros(s);
    }
    out.support = support_of(s);
    out.a.reset();
    return out;
}

}  // namespace banrep::lp
