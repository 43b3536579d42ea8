#include "banrep/oracle.hpp"

#include "banrep/core/errors.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace banrep::oracle {

namespace {

Vector mat_vec(const Matrix& a, const Vector& x) {
    Vector out = Vector::Zero(a.rows());
    for (Index i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (Index j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

Vector mat_t_vec(const Matrix& a, const Vector& x) {
    Vector out = Vector::Zero(a.cols());
    for (Index j = 0; j < a.cols(); ++j) {
        double acc = 0.0;
        for (Index i = 0; i < a.rows(); ++i) acc += a(i, j) * x[i];
        out[j] = acc;
    }
    return out;
}

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

}  // namespace

OracleResult subgradient_minimize(const Objective& f, const Subgradient& g, const Vector& x0,
                                  const SubgradientOptions& options) {
    OracleResult best{x0, f(x0), 0, "subgradient"};
    Vector x = x0;
    double c = options.step;
    std::size_t k = 0;
    for (std::size_t it = 1; it <= options.iterations; ++it) {
        ++k;
        const Vector d = g(x);
        x -= (c / std::sqrt(static_cast<double>(k))) * d;
        const double fx = f(x);
        if (fx < best.objective) {
            best.objective = fx;
            best.minimizer = x;
        }
        if (options.epoch > 0 && it % options.epoch == 0) {
            x = best.minimizer;
            k = 0;
            c *= options.decay;
        }
    }
    best.iterations = options.iterations;
    return best;
}

OracleResult enumerate_support_solve(const Matrix& h, const Vector& y, double lambda, Index max_support) {
    const Index n = h.cols();
    if (n > kMaxEnumerationColumns) throw ValidationError("support enumeration is limited to N <= 12 columns");
    if (h.rows() != y.size()) throw DimensionError("enumeration data", h.rows(), y.size());
    max_support = std::min(max_support, n);

    auto objective = [&](const Vector& x) {
        const Vector r = y - mat_vec(h, x);
        double e = 0.0;
        for (Index i = 0; i < r.size(); ++i) e += r[i] * r[i];
        double l1 = 0.0;
        for (Index j = 0; j < n; ++j) l1 += std::abs(x[j]);
        return e + lambda * l1;
    };

    OracleResult best{Vector::Zero(n), objective(Vector::Zero(n)), 1, "enumeration"};
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        const Index size = std::popcount(mask);
        if (size > max_support) continue;
        std::vector<Index> cols;
        for (Index j = 0; j < n; ++j) {
            if (mask & (1u << j)) cols.push_back(j);
        }
        Matrix hs(h.rows(), size);
        for (Index k = 0; k < size; ++k) hs.col(k) = h.col(cols[static_cast<std::size_t>(k)]);
        const Matrix gram = hs.transpose() * hs;
        const Eigen::FullPivLU<Matrix> lu(gram);
        if (lu.rank() < size) continue;
        const Vector hty = hs.transpose() * y;
        for (unsigned signs = 0; signs < (1u << size); ++signs) {
            Vector rhs = hty;
            for (Index k = 0; k < size; ++k) rhs[k] -= 0.5 * lambda * ((signs & (1u << k)) ? -1.0 : 1.0);
            const Vector xs = lu.solve(rhs);
            Vector x = Vector::Zero(n);
            for (Index k = 0; k < size; ++k) x[cols[static_cast<std::size_t>(k)]] = xs[k];
            const double fx = objective(x);
            ++best.iterations;
            if (fx < best.objective) {
                best.objective = fx;
                best.minimizer = x;
            }
        }
    }
    return best;
}

Vector finite_diff_grad(const Objective& f, const Vector& x, double step) {
    Vector g(x.size());
    Vector xp = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double orig = xp[i];
        xp[i] = orig + step;
        const double fp = f(xp);
        xp[i] = orig - step;
        const double fm = f(xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

double reference_loss(DataTerm kind, double delta, const Vector& y, const Vector& z) {
    if (y.size() != z.size()) throw DimensionError("reference loss", y.size(), z.size());
    double acc = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        const double r = std::abs(y[i] - z[i]);
        if (kind == DataTerm::quadratic || r <= delta) {
            acc += r * r;
        } else {
            acc += 2.0 * delta * r - delta * delta;
        }
    }
    return acc;
}

Vector reference_loss_subgradient(DataTerm kind, double delta, const Vector& y, const Vector& z) {
    Vector g(y.size());
    for (Index i = 0; i < y.size(); ++i) {
        const double r = z[i] - y[i];
        if (kind == DataTerm::quadratic || std::abs(r) <= delta) {
            g[i] = 2.0 * r;
        } else {
            g[i] = 2.0 * delta * sgn(r);
        }
    }
    return g;
}

double reference_dense_objective(const Matrix& h, const Vector& y, double lambda, double p, double psi, DataTerm kind,
                                 double delta, const Vector& x) {
    if (h.cols() != x.size()) throw DimensionError("reference candidate", h.cols(), x.size());
    const double data = reference_loss(kind, delta, y, mat_vec(h, x));
    double acc = 0.0;
    for (Index j = 0; j < x.size(); ++j) acc += std::pow(std::abs(x[j]), p);
    const double norm = std::pow(acc, 1.0 / p);
    return data + lambda * std::pow(norm, psi);
}

std::pair<Objective, Subgradient> lp_problem(const Matrix& h, const Vector& y, double lambda, double p, DataTerm kind,
                                             double delta) {
    Objective f = [=](const Vector& x) {
        double reg = 0.0;
        for (Index j = 0; j < x.size(); ++j) reg += std::pow(std::abs(x[j]), p);
        return reference_loss(kind, delta, y, mat_vec(h, x)) + lambda * reg;
    };
    Subgradient g = [=](const Vector& x) {
        Vector out = mat_t_vec(h, reference_loss_subgradient(kind, delta, y, mat_vec(h, x)));
        for (Index j = 0; j < x.size(); ++j) out[j] += lambda * p * std::pow(std::abs(x[j]), p - 1.0) * sgn(x[j]);
        return out;
    };
    return {f, g};
}

std::pair<Objective, Subgradient> rkhs_problem(const Matrix& g, const Vector& y, double lambda, DataTerm kind,
                                               double delta) {
    Objective f = [=](const Vector& a) {
        const Vector ga = mat_vec(g, a);
        double quad = 0.0;
        for (Index i = 0; i < a.size(); ++i) quad += a[i] * ga[i];
        return reference_loss(kind, delta, y, ga) + lambda * quad;
    };
    Subgradient sg = [=](const Vector& a) {
        const Vector ga = mat_vec(g, a);
        Vector out = mat_t_vec(g, reference_loss_subgradient(kind, delta, y, ga));
        for (Index i = 0; i < a.size(); ++i) out[i] += 2.0 * lambda * ga[i];
        return out;
    };
    return {f, sg};
}

double gram_spectral_bound(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Vector v = Vector::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
    double est = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector w = mat_t_vec(a, mat_vec(a, v));
        const double nrm = w.norm();
        if (nrm == 0.0) return 0.0;
        est = nrm;
        v = w / nrm;
    }
    return est;
}

}  // namespace banrep::oracle
