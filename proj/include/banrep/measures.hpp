#pragma once

// Total-variation recovery of spike trains on a box Omega in R^d, d in {1, 2}:
//
//     min_f  ||y - nu(f)||^2 + lambda ||f||_M
//
// over signed measures f, with solutions sum_k a_k delta(. - x_k), K <= M.

#include "banrep/core/atoms.hpp"
#include "banrep/core/types.hpp"

#include <string>
#include <vector>

namespace banrep::measures {

struct SpikeTrain {
    Points positions;  // K x d
    Vector amplitudes;
    Box domain;

    Index size() const { return amplitudes.size(); }
    /// Total variation sum_k |a_k|.
    double tv_norm() const;
};

/// Default grid resolution: 512 cells for d = 1, 128 per axis for d = 2.
Index default_cells(Index dimension);

/// Grid spacing per axis for a cell-centre grid with `cells` per axis.
Vector grid_spacing(const Box& domain, Index cells);

/// nu(train) = sum_k a_k nu(x_k)
Vector forward(const AtomSet& atoms, const SpikeTrain& train);

/// ||y - nu(train)||^2 + lambda sum_k |a_k|
double spike_objective(const AtomSet& atoms, const Vector& y, double lambda, const SpikeTrain& train);

/// Negative loss gradient -dE/dz = 2 (y - nu(train)); the certificate input.
Vector loss_residual(const AtomSet& atoms, const Vector& y, const SpikeTrain& train);

/// Atoms sampled once on a grid, for repeated certificate evaluation.
class CertificateGrid {
 public:
    CertificateGrid(const AtomSet& atoms, Points grid);

    const Points& sites() const { return sites_; }
    /// G x M matrix of atom samples.
    const Matrix& samples() const { return samples_; }

    /// eta(x_g) = sum_m residual_m nu_m(x_g) for every grid site.
    Vector evaluate(const Vector& residual) const;

 private:
    Points sites_;
    Matrix samples_;
};

/// One-shot version of CertificateGrid::evaluate.
Vector certificate_grid(const Vector& residual, const AtomSet& atoms, const Points& grid);

struct RefineOptions {
    std::size_t max_iterations = 200;
    double gradient_tolerance = 1e-12;
    /// Spikes closer than this many grid cells (per axis) merge by amplitude addition.
    double merge_cells = 1.0;
    Index cells = 0;  // grid resolution used for the merge tolerance; 0 = default
};

struct RefineResult {
    SpikeTrain train;
    double objective_before = 0.0;
    double objective_after = 0.0;
    std::size_t iterations = 0;
    bool refined = false;
    std::vector<std::string> notes;
};

/// Joint Levenberg-Marquardt descent on positions and amplitudes with signs
/// held fixed and positions clamped to the domain. Close spikes are merged
/// before and after the descent. Never returns a train with a larger objective
/// than the input. Non-differentiable atom kinds return the input unchanged
/// with a note.
RefineResult refine_positions(const SpikeTrain& train, const AtomSet& atoms, const Vector& y, double lambda,
                              const RefineOptions& options = {});

/// Merge spikes whose positions differ by at most `tolerance[k]` on every axis.
/// Positions combine as the |a|-weighted mean; zero-sum merges are removed.
SpikeTrain merge_close(const SpikeTrain& train, const Vector& tolerance);

struct SpikeOptions {
    Index cells = 0;  // 0 = default_cells(d)
    /// Stop when max |eta| <= lambda (1 + certificate_tolerance).
    double certificate_tolerance = 1e-6;
    std::size_t max_additions = 200;
    bool refine = true;
};

struct SpikeSolveResult {
    /// Conditional-gradient solution restricted to the grid.
    SpikeTrain grid_train;
    /// Refined train (equal to grid_train when refinement is off or does not help).
    SpikeTrain train;
    double grid_objective = 0.0;
    /// max_g |eta(x_g)| for the grid solution.
    double certificate_max = 0.0;
    SolveReport report;
};

/// Conditional gradient over the measure ball: add the grid site maximizing
/// |eta|, refit all amplitudes by the finite l1 problem on the active sites,
/// drop zeros, and repeat until the certificate bound holds. The active system
/// is pruned so that K <= M before optional refinement.
SpikeSolveResult spike_solve(const AtomSet& atoms, const Vector& y, double lambda, const SpikeOptions& options = {});

}  // namespace banrep::measures
