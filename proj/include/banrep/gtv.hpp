#pragma once

// Generalized total-variation fitting with shift-invariant kernels:
//
//     min_a  E(y, D a) + lambda ||a||_1,   D[m, j] = h(x_m - tau_j)
//
// where h is the Green's function of a regularization operator L, obtained in
// closed form or numerically from the frequency response of L.

#include "banrep/core/loss.hpp"
#include "banrep/core/types.hpp"

#include <functional>
#include <string>

namespace banrep::gtv {

enum class OperatorKind { frequency_response, super_exponential, direct_kernel };

/// Radial profile: h(x) = profile(|x|).
using Profile = std::function<double(double)>;

struct OperatorSpec {
    OperatorKind kind = OperatorKind::super_exponential;
    /// Even function L^(omega); frequency_response only, d = 1.
    Profile frequency_response;
    double alpha = 1.0;
    Profile kernel;
    Index dimension = 1;

    static OperatorSpec from_frequency_response(Profile l_hat);
    /// h(x) = exp(-|x|^alpha). Throws AdmissibilityError unless 0 < alpha < 2.
    static OperatorSpec super_exponential(double alpha, Index dimension = 1);
    static OperatorSpec direct(Profile h, Index dimension = 1);
};

/// Symmetric sample grid {-extent, ..., -spacing, 0, spacing, ..., extent}.
struct KernelGrid {
    double spacing = 0.01;
    double extent = 20.0;
};

/// Band edge criterion: |1 / L^(band_limit)| <= kBandTolerance.
inline constexpr double kBandTolerance = 1e-8;
/// The kernel must have decayed below this (relative to h(0)) at the grid boundary.
inline constexpr double kDecayTolerance = 1e-6;

struct SampledKernel {
    OperatorKind kind = OperatorKind::direct_kernel;
    Index dimension = 1;
    /// h on the symmetric grid, 2 n + 1 values with h[n] = h(0).
    Vector samples;
    double spacing = 0.0;
    double extent = 0.0;
    /// Frequency band and spacing of the numeric inverse transform (0 for closed forms).
    double band_limit = 0.0;
    double frequency_spacing = 0.0;
    /// Closed form when available; otherwise evaluation interpolates the samples.
    Profile profile;

    /// h(r) for r >= 0; zero beyond the extent when only samples are known.
    double radial(double r) const;
    double operator()(std::span<const double> x) const;
    /// Smallest r with h(r) <= h(0) / e, on the sample grid.
    double width() const;
};

/// Closed forms are evaluated on the grid. For a frequency response the kernel is
/// the inverse Fourier transform of 1 / L^ over [-band, band], computed by a
/// type-I discrete cosine transform on an internal grid whose spacing divides
/// `grid.spacing` and whose Nyquist frequency reaches the band edge.
SampledKernel kernel_from_operator(const OperatorSpec& spec, const KernelGrid& grid = {});

/// L^(omega) = 1 / h^(omega), with h^ the trapezoid cosine transform of the samples.
double infer_frequency_response(const SampledKernel& kernel, double omega);

struct GtvModel {
    SampledKernel kernel;
    Points centers;  // K x d
    Vector coefficients;
    /// sum_k |a_k|, the regularization cost.
    double reg_cost = 0.0;

    Index size() const { return coefficients.size(); }
};

inline constexpr Index kDefaultCenters = 256;
inline constexpr double kDefaultPadWidths = 3.0;

/// Data bounding box padded by `pad_widths` kernel widths, `per_axis` candidates
/// per dimension (end points included).
Points default_center_grid(const Points& sites, const SampledKernel& kernel, Index per_axis = kDefaultCenters,
                           double pad_widths = kDefaultPadWidths);

/// D[m, j] = h(x_m - tau_j)
Matrix dictionary(const SampledKernel& kernel, const Points& sites, const Points& centers);

struct GtvOptions {
    double tolerance = 1e-9;
    std::size_t max_iterations = 20000;
};

struct GtvFit {
    GtvModel model;
    SolveReport report;
};

/// Solves the dictionary l1 problem and prunes the active set to at most M centers.
GtvFit gtv_fit(const Points& sites, const Vector& y, const SampledKernel& kernel, const Points& centers, double lambda,
               const Loss& loss = Loss::quadratic(), const GtvOptions& options = {});

/// sum_k a_k h(x - tau_k)
double gtv_predict(const GtvModel& model, std::span<const double> x);

}  // namespace banrep::gtv
