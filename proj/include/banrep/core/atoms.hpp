#pragma once

#include "banrep/core/types.hpp"

#include <span>
#include <string_view>

namespace banrep {

enum class AtomKind { fourier, gaussian_window, hat_window };

std::string_view atom_kind_name(AtomKind k);

/// A family of M continuous analysis functions on a box in R^d, d in {1, 2}.
///
/// Fourier atoms use the box-normalised coordinate u = (x - lower) / (upper - lower):
/// the constant 1 first, then cos(2 pi k.u), sin(2 pi k.u) for each frequency vector k
/// in a half-space of {|k|_inf <= K}. In 1-D this gives M = 2K + 1.
class AtomSet {
 public:
    static AtomSet fourier(const Box& domain, int max_frequency);
    static AtomSet gaussian_windows(const Box& domain, Points centers, double width);
    /// Triangular windows; continuous but not differentiable at the kinks.
    static AtomSet hat_windows(const Box& domain, Points centers, double width);

    AtomKind kind() const { return kind_; }
    Index size() const { return count_; }
    Index dimension() const { return domain_.dimension(); }
    const Box& domain() const { return domain_; }
    bool differentiable() const { return kind_ != AtomKind::hat_window; }

    /// out[m] = nu_m(x).
    void evaluate(std::span<const double> x, std::span<double> out) const;
    Vector evaluate(std::span<const double> x) const;

    /// out(m, k) = d nu_m / d x_k. Throws ValidationError for non-differentiable kinds.
    Matrix gradient(std::span<const double> x) const;

    /// Row g holds (nu_1(x_g), ..., nu_M(x_g)).
    Matrix sample(const Points& sites) const;

 private:
    AtomSet() = default;
    AtomKind kind_ = AtomKind::fourier;
    Box domain_;
    Index count_ = 0;
    Points frequencies_;  // fourier: nonzero frequency vectors
    Points centers_;      // windows
    double width_ = 0.0;
};

}  // namespace banrep
