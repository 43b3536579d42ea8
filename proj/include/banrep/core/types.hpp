#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace banrep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// One site per row; rows are contiguous so a site can be handed out as a span.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> site(const Points& pts, Index i) {
    return {pts.data() + i * pts.cols(), static_cast<std::size_t>(pts.cols())};
}

inline std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Axis-aligned box [lower, upper] in R^d.
struct Box {
    Vector lower;
    Vector upper;

    static Box interval(double lo, double hi) {
        Box b;
        b.lower = Vector::Constant(1, lo);
        b.upper = Vector::Constant(1, hi);
        return b;
    }

    static Box cube(Index d, double lo, double hi) {
        return Box{Vector::Constant(d, lo), Vector::Constant(d, hi)};
    }

    Index dimension() const { return lower.size(); }

    bool contains(std::span<const double> x, double tol = 0.0) const {
        if (static_cast<Index>(x.size()) != dimension()) return false;
        for (Index k = 0; k < dimension(); ++k) {
            if (x[k] < lower[k] - tol || x[k] > upper[k] + tol) return false;
        }
        return true;
    }

    void clamp(std::span<double> x) const {
        for (Index k = 0; k < dimension(); ++k) {
            if (x[k] < lower[k]) x[k] = lower[k];
            if (x[k] > upper[k]) x[k] = upper[k];
        }
    }
};

/// Cell-centre grid with `cells` samples per dimension (d in {1, 2}).
Points uniform_grid(const Box& box, Index cells);

/// Objective, iteration count and optimality residual carried by every solver result.
struct SolveReport {
    double objective = 0.0;
    std::size_t iterations = 0;
    /// Norm of the stationarity (or subgradient) violation at the returned point.
    double optimality_residual = 0.0;
    std::size_t support_size = 0;
    double wall_time = 0.0;
    bool converged = true;
    std::vector<std::string> notes;
};

}  // namespace banrep
