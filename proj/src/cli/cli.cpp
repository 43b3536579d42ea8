#include "banrep/cli.hpp"

#include "banrep/acceptance.hpp"
#include "banrep/core.hpp"
#include "banrep/duality.hpp"
#include "banrep/gtv.hpp"
#include "banrep/hilbert.hpp"
#include "banrep/lp.hpp"
#include "banrep/measures.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace banrep::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// A config field is missing or out of range.
class ConfigError : public ValidationError {
 public:
    ConfigError(std::string field, const std::string& message)
        : ValidationError(field + ": " + message), field_(std::move(field)), message_(message) {}
    const std::string& field() const { return field_; }
    const std::string& message() const { return message_; }

 private:
    std::string field_;
    std::string message_;
};

struct Flags {
    std::string config;
    std::string output;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::optional<double> tolerance;
    bool verbose = false;
    int criterion = 0;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    std::istringstream ss(s);
    ss >> v;
    return !ss.fail() && ss.eof();
}

/// Row-major CSV; a first line that does not parse as numbers is a header.
std::vector<std::vector<double>> read_csv(const fs::path& path, const std::string& field) {
    std::ifstream in(path);
    if (!in) throw ConfigError(field, "cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : split_csv_line(line)) {
            double v = 0.0;
            if (!parse_double(c, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError(field, path.string() + " line " + std::to_string(lineno) + " is not numeric");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ConfigError(field, path.string() + " line " + std::to_string(lineno) + " has a different column count");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError(field, path.string() + " holds no data");
    return rows;
}

json to_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json to_json(const Points& p) {
    json a = json::array();
    for (Index i = 0; i < p.rows(); ++i) {
        json row = json::array();
        for (Index c = 0; c < p.cols(); ++c) row.push_back(p(i, c));
        a.push_back(row);
    }
    return a;
}

json report_json(const SolveReport& r) {
    json j;
    j["objective"] = r.objective;
    j["iterations"] = r.iterations;
    j["optimality_residual"] = r.optimality_residual;
    j["support_size"] = r.support_size;
    j["converged"] = r.converged;
    j["notes"] = r.notes;
    return j;
}

/// Reads fields from the user config and records every value it resolves,
/// defaults included, in `resolved`.
class Reader {
 public:
    using Node = std::function<json&()>;

    Reader(const json& in, json& resolved, fs::path base)
        : Reader(in, [&resolved]() -> json& { return resolved; }, "", std::move(base)) {}

    Reader(const json& in, Node out, std::string prefix, fs::path base)
        : in_(in), node_(std::move(out)), prefix_(std::move(prefix)), base_(std::move(base)) {
        if (!in_.is_object()) throw ConfigError(prefix_.empty() ? "/" : prefix_, "expected an object");
    }

    std::string field(const std::string& key) const { return prefix_ + "/" + key; }
    bool has(const std::string& key) const { return in_.contains(key); }
    bool has_text(const std::string& key) const { return in_.contains(key) && in_[key].is_string(); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        double v = 0.0;
        if (in_.contains(key)) {
            if (!in_[key].is_number()) throw ConfigError(field(key), "expected a number");
            v = in_[key].get<double>();
            if (!std::isfinite(v)) throw ConfigError(field(key), "must be finite");
        } else if (fallback) {
            v = *fallback;
        } else {
            throw ConfigError(field(key), "required field is missing");
        }
        node_()[key] = v;
        return v;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double v = number(key, fallback);
        if (!(v > 0.0)) throw ConfigError(field(key), "must be positive");
        return v;
    }

    Index count(const std::string& key, std::optional<Index> fallback, Index lo, Index hi) {
        Index v = 0;
        if (in_.contains(key)) {
            if (!in_[key].is_number_integer()) throw ConfigError(field(key), "expected an integer");
            v = in_[key].get<Index>();
        } else if (fallback) {
            v = *fallback;
        } else {
            throw ConfigError(field(key), "required field is missing");
        }
        if (v < lo || v > hi) {
            throw ConfigError(field(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        node_()[key] = v;
        return v;
    }

    bool flag(const std::string& key, bool fallback) {
        bool v = fallback;
        if (in_.contains(key)) {
            if (!in_[key].is_boolean()) throw ConfigError(field(key), "expected true or false");
            v = in_[key].get<bool>();
        }
        node_()[key] = v;
        return v;
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        std::string v;
        if (in_.contains(key)) {
            if (!in_[key].is_string()) throw ConfigError(field(key), "expected a string");
            v = in_[key].get<std::string>();
        } else if (fallback) {
            v = *fallback;
        } else {
            throw ConfigError(field(key), "required field is missing");
        }
        node_()[key] = v;
        return v;
    }

    /// Inline rows under `key`, or a CSV file named by `key`_file.
    std::vector<std::vector<double>> rows(const std::string& key) {
        const std::string file_key = key + "_file";
        if (in_.contains(key)) {
            const json& v = in_[key];
            if (!v.is_array() || v.empty()) throw ConfigError(field(key), "expected a non-empty array");
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const json& r = v[i];
                std::vector<double> row;
                if (r.is_number()) {
                    row.push_back(r.get<double>());
                } else if (r.is_array()) {
                    for (const auto& c : r) {
                        if (!c.is_number()) throw ConfigError(field(key) + "/" + std::to_string(i), "expected numbers");
                        row.push_back(c.get<double>());
                    }
                } else {
                    throw ConfigError(field(key) + "/" + std::to_string(i), "expected a number or an array");
                }
                if (!rows.empty() && row.size() != rows.front().size()) {
                    throw ConfigError(field(key) + "/" + std::to_string(i), "rows differ in length");
                }
                for (double x : row) {
                    if (!std::isfinite(x)) throw ConfigError(field(key) + "/" + std::to_string(i), "entries must be finite");
                }
                rows.push_back(std::move(row));
            }
            node_()[key] = v;
            return rows;
        }
        if (in_.contains(file_key)) {
            if (!in_[file_key].is_string()) throw ConfigError(field(file_key), "expected a path");
            const std::string name = in_[file_key].get<std::string>();
            node_()[file_key] = name;
            fs::path p(name);
            if (p.is_relative()) p = base_ / p;
            return read_csv(p, field(file_key));
        }
        throw ConfigError(field(key), "required field is missing (inline array or " + file_key + ")");
    }

    Vector vector(const std::string& key) {
        const auto r = rows(key);
        std::vector<double> flat;
        if (r.size() == 1) {
            flat = r.front();
        } else if (r.front().size() == 1) {
            for (const auto& row : r) flat.push_back(row.front());
        } else {
            throw ConfigError(field(key), "expected a single row or column");
        }
        return Eigen::Map<const Vector>(flat.data(), static_cast<Index>(flat.size()));
    }

    Matrix matrix(const std::string& key) {
        const auto r = rows(key);
        Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.front().size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            for (std::size_t j = 0; j < r[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = r[i][j];
        }
        return m;
    }

    Points points(const std::string& key) {
        const Matrix m = matrix(key);
        return Points(m);
    }

    void record(const std::string& key, json value) { node_()[key] = std::move(value); }

    Reader child(const std::string& key) {
        if (!in_.contains(key) || !node_().contains(key)) node_()[key] = json::object();
        static const json empty = json::object();
        Node parent = node_;
        return Reader(in_.contains(key) ? in_[key] : empty, [parent, key]() -> json& { return parent()[key]; },
                      field(key), base_);
    }

 private:
    // Resolved nodes are looked up on every write: ordered_json keeps members
    // in a vector, so references into it do not survive insertions.
    const json& in_;
    Node node_;
    std::string prefix_;
    fs::path base_;
};

Loss read_loss(Reader& r) {
    if (!r.has("loss") || r.has_text("loss")) {
        // Bare names take the default parameters.
        const std::string kind = r.text("loss", "quadratic");
        if (kind == "quadratic") return Loss::quadratic();
        if (kind == "huber") return Loss::huber(1.0);
        if (kind == "equality") return Loss::equality();
        throw ConfigError(r.field("loss"), "unknown loss '" + kind + "' (quadratic, huber, equality)");
    }
    Reader l = r.child("loss");
    const std::string kind = l.text("kind", "quadratic");
    if (kind == "quadratic") return Loss::quadratic();
    if (kind == "huber") return Loss::huber(l.positive("delta", 1.0));
    if (kind == "equality") return Loss::equality(l.positive("tolerance", 1e-6));
    throw ConfigError(l.field("kind"), "unknown loss '" + kind + "' (quadratic, huber, equality)");
}

/// lambda, or lambda_relative times ||y||.
double read_lambda(Reader& r, const Vector& y) {
    if (r.has("lambda_relative")) {
        const double rel = r.positive("lambda_relative");
        const double lambda = rel * y.norm();
        if (!(lambda > 0.0)) throw ConfigError(r.field("lambda_relative"), "gives lambda = 0 for zero data");
        return lambda;
    }
    return r.positive("lambda");
}

Box read_domain(Reader& r, Index default_dim) {
    if (!r.has("domain")) {
        r.record("domain", json::array({0.0, 1.0}));
        return Box::cube(default_dim, 0.0, 1.0);
    }
    Matrix m = r.matrix("domain");
    if (m.size() == 2 && (m.rows() == 1 || m.cols() == 1)) return Box::interval(m(0, 0), m(m.rows() - 1, m.cols() - 1));
    if (m.cols() == 2 && m.rows() <= 2) {
        Box b{m.col(0), m.col(1)};
        return b;
    }
    throw ConfigError(r.field("domain"), "expected [lo, hi] or [[lo, hi], [lo, hi]]");
}

struct Outcome {
    json result;
    std::optional<SolveReport> report;
    json plot;
    bool ok = true;
};

Outcome cmd_conjugate(Reader& r, const Flags& flags) {
    const Vector x = r.vector("x");
    const double p = r.number("p");
    const double tol = flags.tolerance.value_or(1e-10);
    const Vector xs = duality::lp_conjugate(x, p);
    const auto check = duality::check_conjugate_pair(x, xs, p, tol);
    Outcome o;
    o.result["x"] = to_json(x);
    o.result["x_star"] = to_json(xs);
    o.result["p"] = p;
    o.result["q"] = duality::conjugate_exponent(p);
    o.result["norm_p"] = linalg::lp_norm(x, p);
    o.result["norm_q"] = linalg::lp_norm(xs, duality::conjugate_exponent(p));
    json c;
    c["pass"] = check.pass;
    c["norm_residual"] = check.norm_residual;
    c["duality_residual"] = check.duality_residual;
    c["threshold"] = check.threshold;
    o.result["check"] = c;
    o.ok = check.pass;
    return o;
}

Outcome cmd_tikhonov(Reader& r, const Flags&) {
    const Matrix h = r.matrix("H");
    const Vector y = r.vector("y");
    const double lambda = r.positive("lambda");
    if (h.rows() != h.cols()) throw ConfigError(r.field("H"), "must be square");
    if (h.rows() != y.size()) throw ConfigError(r.field("y"), "length differs from the size of H");
    const auto fit = hilbert::tikhonov_fit(h, y, lambda);
    Outcome o;
    o.result["a"] = to_json(fit.a);
    o.result["residual"] = fit.report.optimality_residual;
    o.report = fit.report;
    o.ok = fit.report.converged;
    return o;
}

hilbert::Kernel read_kernel(Reader& k) {
    const std::string kind = k.text("kind", "gaussian");
    if (kind == "gaussian") return hilbert::Kernel::gaussian(k.positive("sigma", 1.0));
    if (kind == "laplacian") return hilbert::Kernel::laplacian(k.positive("sigma", 1.0));
    if (kind == "polynomial") {
        return hilbert::Kernel::polynomial(static_cast<int>(k.count("degree", 2, 1, 64)), k.number("offset", 1.0));
    }
    if (kind == "super_exponential") return hilbert::Kernel::super_exponential(k.positive("alpha", 1.0));
    throw ConfigError(k.field("kind"), "unknown kernel '" + kind + "'");
}

Vector linspace_samples(double lo, double hi, Index n) { return Vector::LinSpaced(n, lo, hi); }

Outcome cmd_rkhs(Reader& r, const Flags&) {
    Reader kr = r.child("kernel");
    const hilbert::Kernel kernel = read_kernel(kr);
    const Points pts = r.points("points");
    const Vector y = r.vector("y");
    if (pts.rows() != y.size()) throw ConfigError(r.field("y"), "length differs from the number of points");
    const Loss loss = read_loss(r);
    const double lambda = loss.is_equality() ? r.number("lambda", 0.0) : r.positive("lambda");
    if (lambda < 0.0) throw ConfigError(r.field("lambda"), "must be non-negative");
    const auto fit = hilbert::rkhs_fit(kernel, pts, y, lambda, loss);
    Outcome o;
    o.result["kernel"] = kernel.describe();
    o.result["centers"] = to_json(fit.model.centers);
    o.result["coefficients"] = to_json(fit.model.coefficients);
    Vector fitted(pts.rows());
    for (Index i = 0; i < pts.rows(); ++i) fitted[i] = hilbert::rkhs_predict(fit.model, site(pts, i));
    o.result["fitted"] = to_json(fitted);
    o.result["rkhs_norm_squared"] = hilbert::rkhs_norm_squared(fit.model);
    o.report = fit.report;
    o.ok = fit.report.converged;
    if (pts.cols() == 1) {
        Reader pr = r.child("plot");
        const double span = pts.col(0).maxCoeff() - pts.col(0).minCoeff();
        const double lo = pr.number("lower", pts.col(0).minCoeff() - 0.1 * span);
        const double hi = pr.number("upper", pts.col(0).maxCoeff() + 0.1 * span);
        const Index n = pr.count("samples", 201, 2, 100000);
        const Vector xs = linspace_samples(lo, hi, n);
        Vector f(n);
        for (Index i = 0; i < n; ++i) f[i] = hilbert::rkhs_predict(fit.model, std::span<const double>(&xs[i], 1));
        o.plot["x"] = to_json(xs);
        o.plot["f"] = to_json(f);
    }
    return o;
}

json one_based(const std::vector<Index>& idx) {
    json a = json::array();
    for (Index i : idx) a.push_back(i + 1);
    return a;
}

Outcome cmd_lp(Reader& r, const Flags& flags) {
    const Matrix h = r.matrix("H");
    const Vector y = r.vector("y");
    if (h.rows() != y.size()) throw ConfigError(r.field("y"), "length differs from the rows of H");
    const double lambda = r.positive("lambda");
    const double p = r.number("p", 1.0);
    if (!(p >= 1.0)) throw ConfigError(r.field("p"), "must be >= 1");
    const Loss loss = read_loss(r);
    if (loss.is_equality()) throw ConfigError(r.field("loss"), "lp-solve takes a quadratic or huber loss");
    const bool prune = r.flag("prune", p == 1.0);
    lp::LpOptions opt;
    opt.tolerance = flags.tolerance.value_or(opt.tolerance);
    auto res = lp::lp_primal_solve(h, y, lambda, p, loss, opt);
    lp::LpSolution sol = res.solution;
    if (p == 1.0 && prune) {
        sol = lp::prune_to_extreme(sol, h);
        res.report.support_size = sol.support.size();
    }
    Outcome o;
    o.result["s"] = to_json(sol.s);
    o.result["support"] = one_based(sol.support);
    json values = json::array();
    for (Index i : sol.support) values.push_back(sol.s[i]);
    o.result["values"] = values;
    o.result["pruned"] = p == 1.0 && prune;
    if (p > 1.0 && res.report.converged) {
        o.result["certificate"] = to_json(lp::dual_certificate(sol, h, y, lambda, loss));
    }
    res.report.objective = lp::lp_objective(h, y, lambda, p, loss, sol.s);
    o.report = res.report;
    o.ok = res.report.converged;
    return o;
}

AtomSet read_atoms(Reader& a, const Box& domain) {
    const std::string kind = a.text("kind", "fourier");
    if (kind == "fourier") return AtomSet::fourier(domain, static_cast<int>(a.count("max_frequency", 4, 0, 256)));
    if (kind == "gaussian" || kind == "hat") {
        const Points centers = a.points("centers");
        const double width = a.positive("width");
        return kind == "gaussian" ? AtomSet::gaussian_windows(domain, centers, width) : AtomSet::hat_windows(domain, centers, width);
    }
    throw ConfigError(a.field("kind"), "unknown atom kind '" + kind + "' (fourier, gaussian, hat)");
}

Outcome cmd_spikes(Reader& r, const Flags& flags) {
    const Box domain = read_domain(r, 1);
    Reader ar = r.child("atoms");
    const AtomSet atoms = read_atoms(ar, domain);
    Vector y;
    json truth;
    if (r.has("synthetic")) {
        Reader s = r.child("synthetic");
        const Index count = s.count("count", 3, 1, 64);
        const double sep = s.number("min_separation", 0.1);
        const double noise = s.number("noise", 0.0);
        std::mt19937_64 rng(flags.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        measures::SpikeTrain t;
        t.domain = domain;
        t.positions.resize(count, domain.dimension());
        t.amplitudes.resize(count);
        for (Index k = 0; k < count; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
                for (Index c = 0; c < domain.dimension(); ++c) {
                    t.positions(k, c) = domain.lower[c] + (domain.upper[c] - domain.lower[c]) * unit(rng);
                }
                placed = true;
                for (Index j = 0; j < k; ++j) {
                    if ((t.positions.row(k) - t.positions.row(j)).norm() < sep) placed = false;
                }
            }
            if (!placed) throw ConfigError(s.field("min_separation"), "cannot place spikes this far apart");
            t.amplitudes[k] = (0.5 + unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
        }
        y = measures::forward(atoms, t);
        std::normal_distribution<double> nd;
        for (Index m = 0; m < y.size(); ++m) y[m] += noise * nd(rng);
        truth["positions"] = to_json(t.positions);
        truth["amplitudes"] = to_json(t.amplitudes);
    } else {
        y = r.vector("y");
        if (y.size() != atoms.size()) throw ConfigError(r.field("y"), "length differs from the number of atoms");
    }
    const double lambda = read_lambda(r, y);
    measures::SpikeOptions opt;
    opt.cells = r.count("cells", measures::default_cells(domain.dimension()), 1, 1 << 16);
    opt.refine = r.flag("refine", true);
    opt.max_additions = static_cast<std::size_t>(r.count("max_additions", 200, 1, 100000));
    opt.certificate_tolerance = flags.tolerance.value_or(opt.certificate_tolerance);
    const auto res = measures::spike_solve(atoms, y, lambda, opt);

    Outcome o;
    o.result["lambda"] = lambda;
    o.result["y"] = to_json(y);
    if (!truth.is_null()) o.result["truth"] = truth;
    o.result["positions"] = to_json(res.train.positions);
    o.result["amplitudes"] = to_json(res.train.amplitudes);
    o.result["tv_norm"] = res.train.tv_norm();
    o.result["grid_positions"] = to_json(res.grid_train.positions);
    o.result["grid_amplitudes"] = to_json(res.grid_train.amplitudes);
    o.result["grid_objective"] = res.grid_objective;
    o.result["certificate_max"] = res.certificate_max;
    o.report = res.report;
    o.ok = res.report.converged;
    if (domain.dimension() == 1) {
        const Points grid = uniform_grid(domain, opt.cells);
        const Vector eta = measures::certificate_grid(measures::loss_residual(atoms, y, res.train), atoms, grid);
        o.plot["x"] = to_json(Vector(grid.col(0)));
        o.plot["eta"] = to_json(eta);
    }
    return o;
}

gtv::SampledKernel read_gtv_kernel(Reader& k, Reader& g, json& info) {
    const std::string kind = k.text("kind", "super_exponential");
    gtv::KernelGrid grid;
    grid.spacing = g.positive("spacing", grid.spacing);
    grid.extent = g.positive("extent", grid.extent);
    gtv::OperatorSpec spec;
    if (kind == "super_exponential") {
        spec = gtv::OperatorSpec::super_exponential(k.number("alpha", 1.0));
    } else if (kind == "frequency_response") {
        // L^(w) = sum_k c_k w^{2k}
        const Vector c = k.vector("coefficients");
        spec = gtv::OperatorSpec::from_frequency_response([c](double w) {
            double acc = 0.0;
            for (Index i = c.size() - 1; i >= 0; --i) acc = acc * w * w + c[i];
            return acc;
        });
    } else {
        throw ConfigError(k.field("kind"), "unknown kernel '" + kind + "' (super_exponential, frequency_response)");
    }
    const auto kern = gtv::kernel_from_operator(spec, grid);
    info["spacing"] = kern.spacing;
    info["extent"] = kern.extent;
    info["band_limit"] = kern.band_limit;
    info["frequency_spacing"] = kern.frequency_spacing;
    info["width"] = kern.width();
    return kern;
}

Outcome cmd_gtv(Reader& r, const Flags& flags) {
    Reader kr = r.child("kernel");
    Reader gr = r.child("grid");
    json kinfo;
    const gtv::SampledKernel kern = read_gtv_kernel(kr, gr, kinfo);
    Points sites;
    Vector y;
    if (r.has("synthetic")) {
        Reader s = r.child("synthetic");
        const Index count = s.count("count", 10, 1, 4096);
        const double lo = s.number("lower", 0.0);
        const double hi = s.number("upper", 10.0);
        const double noise = s.number("noise", 0.0);
        if (!(hi > lo)) throw ConfigError(s.field("upper"), "must exceed lower");
        std::mt19937_64 rng(flags.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> nd;
        std::vector<double> xs;
        for (Index i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * unit(rng));
        std::sort(xs.begin(), xs.end());
        sites.resize(count, 1);
        y.resize(count);
        const double c1 = lo + 0.3 * (hi - lo);
        const double c2 = lo + 0.65 * (hi - lo);
        for (Index i = 0; i < count; ++i) {
            const double x = xs[static_cast<std::size_t>(i)];
            sites(i, 0) = x;
            const double d1 = x - c1;
            const double d2 = x - c2;
            y[i] = kern.radial(d1) - 0.6 * kern.radial(d2) + noise * nd(rng);
        }
    } else {
        sites = r.points("sites");
        y = r.vector("y");
        if (sites.rows() != y.size()) throw ConfigError(r.field("y"), "length differs from the number of sites");
        if (sites.cols() != 1) throw ConfigError(r.field("sites"), "the CLI fits one-dimensional data");
    }
    const double lambda = read_lambda(r, y);
    const Loss loss = read_loss(r);
    Points centers;
    if (r.has("centers")) {
        centers = r.points("centers");
    } else {
        Reader cr = r.child("center_grid");
        centers = gtv::default_center_grid(sites, kern, cr.count("count", gtv::kDefaultCenters, 1, 1 << 16),
                                           cr.number("pad_widths", gtv::kDefaultPadWidths));
    }
    gtv::GtvOptions opt;
    opt.tolerance = flags.tolerance.value_or(opt.tolerance);
    const auto fit = gtv::gtv_fit(sites, y, kern, centers, lambda, loss, opt);

    Outcome o;
    o.result["lambda"] = lambda;
    o.result["kernel"] = kinfo;
    o.result["sites"] = to_json(sites);
    o.result["y"] = to_json(y);
    o.result["centers"] = to_json(fit.model.centers);
    o.result["coefficients"] = to_json(fit.model.coefficients);
    o.result["reg_cost"] = fit.model.reg_cost;
    o.report = fit.report;
    o.ok = fit.report.converged;
    const double lo = centers.col(0).minCoeff();
    const double hi = centers.col(0).maxCoeff();
    const Vector xs = linspace_samples(lo, hi, 401);
    Vector f(xs.size());
    for (Index i = 0; i < xs.size(); ++i) f[i] = gtv::gtv_predict(fit.model, std::span<const double>(&xs[i], 1));
    o.plot["x"] = to_json(xs);
    o.plot["f"] = to_json(f);
    return o;
}

void emit(const json& doc, const Flags& flags, std::ostream& out) {
    const std::string text = doc.dump(2) + "\n";
    if (flags.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(flags.output, std::ios::binary);
    if (!f) throw ConfigError("--output", "cannot write " + flags.output);
    f << text;
}

int error_exit(const std::string& command, const Flags& flags, const std::string& kind, const std::string& field,
               const std::string& message, std::ostream& out, std::ostream& err) {
    json doc;
    doc["command"] = command;
    doc["status"] = "error";
    doc["kind"] = kind;
    json e;
    e["path"] = flags.config.empty() ? "<command line>" : flags.config;
    e["field"] = field;
    e["message"] = message;
    doc["errors"] = json::array({e});
    err << "error: " << (field.empty() ? "" : field + ": ") << message << "\n";
    try {
        emit(doc, flags, out);
    } catch (const Error&) {
        out << doc.dump(2) << "\n";
    }
    return kind == "validation" ? kExitValidation : kExitNumeric;
}

int run_selftest(const Flags& flags, std::ostream& out, std::ostream& err) {
    acceptance::Options opt;
    opt.seed = flags.seed_given ? flags.seed : acceptance::kDefaultSeed;
    opt.cli = [](const std::vector<std::string>& args) {
        std::ostringstream sink;
        return run(args, sink, sink);
    };
    std::vector<int> ids;
    if (flags.criterion == 0) {
        for (int id = 1; id <= acceptance::kCriterionCount; ++id) ids.push_back(id);
    } else {
        ids.push_back(flags.criterion);
    }
    json doc;
    doc["command"] = "selftest";
    json cfg;
    cfg["seed"] = opt.seed;
    cfg["criterion"] = flags.criterion;
    doc["config"] = cfg;
    json results = json::array();
    bool all = true;
    for (int id : ids) {
        const auto r = acceptance::run_criterion(id, opt);
        out << acceptance::summary_line(r) << "\n";
        out.flush();
        all = all && r.passed();
        results.push_back(json::parse(acceptance::criterion_document(r)));
        if (flags.verbose) err << acceptance::criterion_document(r) << "\n";
    }
    doc["status"] = all ? "ok" : "failed";
    doc["result"] = {{"criteria", results}};
    if (!flags.output.empty()) emit(doc, flags, out);
    return all ? kExitOk : kExitNumeric;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regularized inverse problems: duality maps, kernel fits, lp, spikes, gTV"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"conjugate", "lp duality map of a vector and its identity checks"},
        {"rkhs-fit", "kernel regression in an RKHS"},
        {"tikhonov", "a = (H + lambda I)^-1 y"},
        {"lp-solve", "lp-regularized inverse problem, optional l1 pruning"},
        {"spikes", "total-variation spike recovery from Fourier or window measurements"},
        {"gtv-fit", "sparse kernel expansion with a gTV regularizer"},
        {"selftest", "run the acceptance criteria"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        if (name != "selftest") sub->add_option("--config", flags.config, "JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("--output", flags.output, "result document path (default stdout)");
        sub->add_option("--seed", flags.seed, "seed for synthetic data")->each([&](const std::string&) { flags.seed_given = true; });
        sub->add_option("--tolerance", flags.tolerance, "solver tolerance override")->check(CLI::PositiveNumber);
        sub->add_flag("--verbose", flags.verbose, "print the solve report to stderr");
        if (name == "selftest") {
            sub->add_option("--criterion", flags.criterion, "run one criterion (0 = all)")
                ->check(CLI::Range(0, acceptance::kCriterionCount));
        }
    }

    std::vector<std::string> owned = args;
    if (owned.empty()) owned.emplace_back("banrep");
    std::vector<char*> argv;
    for (auto& a : owned) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const auto subs = app.get_subcommands();
        const std::string command = subs.empty() ? "" : subs.front()->get_name();
        return error_exit(command, flags, "validation", "<arguments>", e.what(), out, err);
    }
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "selftest") return run_selftest(flags, out, err);

    try {
        json input;
        {
            std::ifstream in(flags.config);
            try {
                input = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError("/", std::string("malformed JSON: ") + e.what());
            }
        }
        json resolved = json::object();
        const fs::path base = fs::path(flags.config).parent_path();
        Reader reader(input, resolved, base);
        Outcome o;
        if (command == "conjugate") o = cmd_conjugate(reader, flags);
        else if (command == "tikhonov") o = cmd_tikhonov(reader, flags);
        else if (command == "rkhs-fit") o = cmd_rkhs(reader, flags);
        else if (command == "lp-solve") o = cmd_lp(reader, flags);
        else if (command == "spikes") o = cmd_spikes(reader, flags);
        else o = cmd_gtv(reader, flags);

        for (auto it = input.begin(); it != input.end(); ++it) {
            if (!resolved.contains(it.key())) resolved[it.key()] = it.value();
        }
        resolved["seed"] = flags.seed;
        if (flags.tolerance) resolved["tolerance"] = *flags.tolerance;

        json doc;
        doc["command"] = command;
        doc["status"] = o.ok ? "ok" : "not_converged";
        doc["config"] = resolved;
        doc["result"] = o.result;
        if (o.report) doc["report"] = report_json(*o.report);
        if (!o.plot.is_null()) doc["plot"] = o.plot;
        emit(doc, flags, out);
        if (flags.verbose && o.report) {
            err << command << ": objective " << o.report->objective << ", iterations " << o.report->iterations
                << ", residual " << o.report->optimality_residual << ", support " << o.report->support_size << "\n";
            for (const auto& n : o.report->notes) err << "  note: " << n << "\n";
        }
        if (!o.ok) {
            err << command << ": did not converge to the requested tolerance\n";
            return kExitNumeric;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        return error_exit(command, flags, "validation", e.field(), e.message(), out, err);
    } catch (const ValidationError& e) {
        return error_exit(command, flags, "validation", "", e.what(), out, err);
    } catch (const DimensionError& e) {
        return error_exit(command, flags, "validation", "", e.what(), out, err);
    } catch (const NumericError& e) {
        return error_exit(command, flags, "numeric", "", e.what(), out, err);
    } catch (const std::exception& e) {
        return error_exit(command, flags, "numeric", "", e.what(), out, err);
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace banrep::cli
