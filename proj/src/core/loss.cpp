#include "banrep/core/loss.hpp"

#include "banrep/core/errors.hpp"

#include <cmath>
#include <limits>

namespace banrep {

std::string_view loss_name(LossKind k) {
    switch (k) {
        case LossKind::quadratic: return "quadratic";
        case LossKind::huber: return "huber";
        case LossKind::equality: return "equality";
    }
    return "unknown";
}

Loss Loss::huber(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("huber loss needs delta > 0");
    return Loss(LossKind::huber, delta);
}

Loss Loss::equality(double tolerance) {
    if (!(tolerance > 0.0)) throw ValidationError("equality loss needs a positive tolerance");
    return Loss(LossKind::equality, tolerance);
}

double Loss::evaluate(const Vector& y, const Vector& z) const {
    if (y.size() != z.size()) throw DimensionError("loss arguments", y.size(), z.size());
    switch (kind_) {
        case LossKind::quadratic: return (y - z).squaredNorm();
        case LossKind::huber: {
            double s = 0.0;
            for (Index m = 0; m < y.size(); ++m) {
                const double r = std::abs(z[m] - y[m]);
                s += r <= param_ ? r * r : 2.0 * param_ * r - param_ * param_;
            }
            return s;
        }
        case LossKind::equality: {
            const double scale = 1.0 + (y.size() > 0 ? y.cwiseAbs().maxCoeff() : 0.0);
            const double gap = y.size() > 0 ? (y - z).cwiseAbs().maxCoeff() : 0.0;
            return gap <= param_ * scale ? 0.0 : std::numeric_limits<double>::infinity();
        }
    }
    return 0.0;
}

Vector Loss::gradient(const Vector& y, const Vector& z) const {
    if (y.size() != z.size()) throw DimensionError("loss arguments", y.size(), z.size());
    Vector g = 2.0 * (z - y);
    if (kind_ == LossKind::huber) {
        for (Index m = 0; m < g.size(); ++m) {
            const double r = z[m] - y[m];
            if (std::abs(r) > param_) g[m] = 2.0 * param_ * (r > 0.0 ? 1.0 : -1.0);
        }
    }
    return g;
}

Vector Loss::curvature(const Vector& y, const Vector& z) const {
    if (y.size() != z.size()) throw DimensionError("loss arguments", y.size(), z.size());
    Vector c = Vector::Constant(y.size(), 2.0);
    if (kind_ == LossKind::huber) {
        for (Index m = 0; m < c.size(); ++m) {
            if (std::abs(z[m] - y[m]) > param_) c[m] = 0.0;
        }
    }
    return c;
}

}  // namespace banrep
