#include "banrep/core/atoms.hpp"

#include "banrep/core/errors.hpp"

#include <cmath>
#include <numbers>

namespace banrep {

std::string_view atom_kind_name(AtomKind k) {
    switch (k) {
        case AtomKind::fourier: return "fourier";
        case AtomKind::gaussian_window: return "gaussian";
        case AtomKind::hat_window: return "hat";
    }
    return "unknown";
}

namespace {

void check_domain(const Box& domain) {
    const Index d = domain.dimension();
    if (d != 1 && d != 2) throw ValidationError("atom domains must be 1-D or 2-D boxes");
    if (domain.upper.size() != d) throw DimensionError("box bounds", d, domain.upper.size());
    for (Index k = 0; k < d; ++k) {
        if (!(domain.upper[k] > domain.lower[k])) throw ValidationError("degenerate domain box");
    }
}

}  // namespace

AtomSet AtomSet::fourier(const Box& domain, int max_frequency) {
    check_domain(domain);
    if (max_frequency < 0) throw ValidationError("max_frequency must be non-negative");
    AtomSet s;
    s.kind_ = AtomKind::fourier;
    s.domain_ = domain;
    const int k = max_frequency;
    if (domain.dimension() == 1) {
        s.frequencies_.resize(k, 1);
        for (int i = 0; i < k; ++i) s.frequencies_(i, 0) = i + 1;
    } else {
        std::vector<std::pair<int, int>> freqs;
        for (int a = 0; a <= k; ++a) {
            for (int b = -k; b <= k; ++b) {
                if (a == 0 && b <= 0) continue;
                freqs.emplace_back(a, b);
            }
        }
        s.frequencies_.resize(static_cast<Index>(freqs.size()), 2);
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            s.frequencies_(static_cast<Index>(i), 0) = freqs[i].first;
            s.frequencies_(static_cast<Index>(i), 1) = freqs[i].second;
        }
    }
    s.count_ = 1 + 2 * s.frequencies_.rows();
    return s;
}

AtomSet AtomSet::gaussian_windows(const Box& domain, Points centers, double width) {
    check_domain(domain);
    if (centers.cols() != domain.dimension()) throw DimensionError("window centers", domain.dimension(), centers.cols());
    if (centers.rows() < 1) throw ValidationError("need at least one window");
    if (!(width > 0.0)) throw ValidationError("window width must be positive");
    AtomSet s;
    s.kind_ = AtomKind::gaussian_window;
    s.domain_ = domain;
    s.centers_ = std::move(centers);
    s.width_ = width;
    s.count_ = s.centers_.rows();
    return s;
}

AtomSet AtomSet::hat_windows(const Box& domain, Points centers, double width) {
    AtomSet s = gaussian_windows(domain, std::move(centers), width);
    s.kind_ = AtomKind::hat_window;
    return s;
}

void AtomSet::evaluate(std::span<const double> x, std::span<double> out) const {
    const Index d = dimension();
    if (static_cast<Index>(x.size()) != d) throw DimensionError("atom evaluation site", d, x.size());
    if (static_cast<Index>(out.size()) != count_) throw DimensionError("atom output", count_, out.size());
    switch (kind_) {
        case AtomKind::fourier: {
            constexpr double two_pi = 2.0 * std::numbers::pi;
            out[0] = 1.0;
            for (Index j = 0; j < frequencies_.rows(); ++j) {
                double phase = 0.0;
                for (Index k = 0; k < d; ++k) {
                    const double u = (x[k] - domain_.lower[k]) / (domain_.upper[k] - domain_.lower[k]);
                    phase += frequencies_(j, k) * u;
                }
                out[1 + 2 * j] = std::cos(two_pi * phase);
                out[2 + 2 * j] = std::sin(two_pi * phase);
            }
            return;
        }
        case AtomKind::gaussian_window:
        case AtomKind::hat_window: {
            for (Index m = 0; m < count_; ++m) {
                double r2 = 0.0;
                for (Index k = 0; k < d; ++k) {
                    const double t = x[k] - centers_(m, k);
                    r2 += t * t;
                }
                if (kind_ == AtomKind::gaussian_window) {
                    out[m] = std::exp(-0.5 * r2 / (width_ * width_));
                } else {
                    out[m] = std::max(0.0, 1.0 - std::sqrt(r2) / width_);
                }
            }
            return;
        }
    }
}

Vector AtomSet::evaluate(std::span<const double> x) const {
    Vector v(count_);
    evaluate(x, as_span(v));
    return v;
}

Matrix AtomSet::gradient(std::span<const double> x) const {
    const Index d = dimension();
    if (static_cast<Index>(x.size()) != d) throw DimensionError("atom gradient site", d, x.size());
    if (!differentiable()) throw ValidationError("atom kind is not differentiable");
    Matrix g = Matrix::Zero(count_, d);
    if (kind_ == AtomKind::fourier) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        for (Index j = 0; j < frequencies_.rows(); ++j) {
            double phase = 0.0;
            for (Index k = 0; k < d; ++k) {
                phase += frequencies_(j, k) * (x[k] - domain_.lower[k]) / (domain_.upper[k] - domain_.lower[k]);
            }
            const double c = std::cos(two_pi * phase);
            const double s = std::sin(two_pi * phase);
            for (Index k = 0; k < d; ++k) {
                const double dphase = two_pi * frequencies_(j, k) / (domain_.upper[k] - domain_.lower[k]);
                g(1 + 2 * j, k) = -s * dphase;
                g(2 + 2 * j, k) = c * dphase;
            }
        }
        return g;
    }
    for (Index m = 0; m < count_; ++m) {
        double r2 = 0.0;
        for (Index k = 0; k < d; ++k) {
            const double t = x[k] - centers_(m, k);
            r2 += t * t;
        }
        const double v = std::exp(-0.5 * r2 / (width_ * width_));
        for (Index k = 0; k < d; ++k) g(m, k) = -v * (x[k] - centers_(m, k)) / (width_ * width_);
    }
    return g;
}

Matrix AtomSet::sample(const Points& sites) const {
    if (sites.cols() != dimension()) throw DimensionError("sample sites", dimension(), sites.cols());
    Matrix a(sites.rows(), count_);
    Vector row(count_);
    for (Index g = 0; g < sites.rows(); ++g) {
        evaluate(site(sites, g), as_span(row));
        a.row(g) = row.transpose();
    }
    return a;
}

}  // namespace banrep
