#pragma once

#include "banrep/core/types.hpp"

#include <string_view>

namespace banrep {

enum class LossKind { quadratic, huber, equality };

std::string_view loss_name(LossKind k);

/// Convex data term E(y, z).
///
///  - quadratic: sum (y_m - z_m)^2
///  - huber(delta): per-sample r^2 for |r| <= delta, 2 delta |r| - delta^2 beyond
///    (matches the quadratic loss inside the band)
///  - equality: 0 when z reproduces y to `tolerance * (1 + ||y||_inf)`, +inf otherwise.
///    Solvers realize it through the quadratic surrogate with a continuation on lambda,
///    so gradient() and curvature() return the quadratic ones.
class Loss {
 public:
    static Loss quadratic() { return Loss(LossKind::quadratic, 0.0); }
    static Loss huber(double delta);
    static Loss equality(double tolerance = 1e-6);

    LossKind kind() const { return kind_; }
    double delta() const { return param_; }
    double tolerance() const { return param_; }
    bool is_equality() const { return kind_ == LossKind::equality; }

    double evaluate(const Vector& y, const Vector& z) const;

    /// dE/dz.
    Vector gradient(const Vector& y, const Vector& z) const;

    /// Diagonal of the (generalized) Hessian in z.
    Vector curvature(const Vector& y, const Vector& z) const;

 private:
    Loss(LossKind k, double param) : kind_(k), param_(param) {}
    LossKind kind_;
    double param_;
};

}  // namespace banrep
