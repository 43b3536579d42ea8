#include "banrep/core/errors.hpp"
#include "banrep/measures.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

using namespace banrep;
using namespace banrep::measures;
using namespace banrep::testing;

namespace {

SpikeTrain train_1d(std::initializer_list<double> pos, std::initializer_list<double> amp) {
    SpikeTrain t;
    t.domain = Box::interval(0.0, 1.0);
    t.positions.resize(static_cast<Index>(pos.size()), 1);
    t.amplitudes.resize(static_cast<Index>(amp.size()));
    Index i = 0;
    for (double p : pos) t.positions(i++, 0) = p;
    i = 0;
    for (double a : amp) t.amplitudes[i++] = a;
    return t;
}

}  // namespace

TEST_CASE("zero data gives the empty train") {
    const AtomSet atoms = AtomSet::fourier(Box::interval(0.0, 1.0), 3);
    const auto r = spike_solve(atoms, Vector::Zero(atoms.size()), 0.1);
    CHECK(r.train.size() == 0);
    CHECK(r.report.objective == 0.0);
    CHECK_THROWS_AS(spike_solve(atoms, Vector::Zero(atoms.size()), 0.0), ValidationError);
}

TEST_CASE("single spike with five fourier atoms") {
    const AtomSet atoms = AtomSet::fourier(Box::interval(0.0, 1.0), 2);
    REQUIRE(atoms.size() == 5);
    const SpikeTrain truth = train_1d({0.4137}, {1.5});
    const Vector y = forward(atoms, truth);
    const auto r = spike_solve(atoms, y, 1e-3 * y.norm());
    // Off-grid truth may split over neighbouring cells before refinement.
    const double cell = grid_spacing(truth.domain, default_cells(1))[0];
    REQUIRE(r.grid_train.size() >= 1);
    for (Index k = 0; k < r.grid_train.size(); ++k) CHECK(std::abs(r.grid_train.positions(k, 0) - 0.4137) <= cell);
    REQUIRE(r.train.size() == 1);
    CHECK(std::abs(r.train.positions(0, 0) - 0.4137) <= cell);
    CHECK(r.train.amplitudes[0] == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("certificate grid") {
    const AtomSet atoms = AtomSet::fourier(Box::interval(0.0, 1.0), 3);
    const Points grid = uniform_grid(atoms.domain(), 64);
    CHECK(certificate_grid(Vector::Zero(atoms.size()), atoms, grid).cwiseAbs().maxCoeff() == 0.0);
    const Vector r = random_vector(3, atoms.size());
    const Vector eta = certificate_grid(r, atoms, grid);
    for (Index g = 0; g < grid.rows(); g += 7) CHECK(eta[g] == doctest::Approx(atoms.evaluate(site(grid, g)).dot(r)));
}

TEST_CASE("random instances: cardinality, certificate and monotone refinement") {
    for (int trial = 0; trial < 12; ++trial) {
        const Box box = Box::interval(0.0, 1.0);
        const AtomSet atoms = trial % 2 ? AtomSet::fourier(box, 4)
                                        : AtomSet::gaussian_windows(box, uniform_grid(box, 9), 0.12);
        const Vector y = random_vector(40 + trial, atoms.size());
        const double lambda = 0.05 * y.norm();
        SpikeOptions opt;
        opt.cells = 256;
        const auto r = spike_solve(atoms, y, lambda, opt);
        CHECK(r.train.size() <= atoms.size());
        CHECK(r.grid_train.size() <= atoms.size());
        if (r.report.converged) CHECK(r.certificate_max <= lambda * (1 + 1e-6));
        CHECK(r.report.objective <= r.grid_objective + 1e-12);
        double loop = 0.0;
        for (Index k = 0; k < r.train.size(); ++k) loop += std::abs(r.train.amplitudes[k]);
        CHECK(r.train.tv_norm() == doctest::Approx(loop).epsilon(1e-15));
        const double manual = (y - forward(atoms, r.train)).squaredNorm() + lambda * r.train.tv_norm();
        CHECK(spike_objective(atoms, y, lambda, r.train) == manual);
        for (Index k = 0; k < r.train.size(); ++k) CHECK(box.contains(site(r.train.positions, k)));
    }
}

TEST_CASE("perturbed amplitude breaks the certificate on the support") {
    const AtomSet atoms = AtomSet::fourier(Box::interval(0.0, 1.0), 4);
    const SpikeTrain truth = train_1d({0.2, 0.55, 0.8}, {1.0, -0.8, 0.6});
    const Vector y = forward(atoms, truth);
    const double lambda = 0.01 * y.norm();
    SpikeOptions opt;
    opt.refine = false;
    const auto r = spike_solve(atoms, y, lambda, opt);
    REQUIRE(r.grid_train.size() > 0);
    SpikeTrain bent = r.grid_train;
    bent.amplitudes[0] *= 1.1;
    const Vector eta = certificate_grid(loss_residual(atoms, y, bent), atoms, bent.positions);
    CHECK(eta.cwiseAbs().maxCoeff() > lambda * (1 + 1e-6));
}

TEST_CASE("refinement") {
    const Box box = Box::interval(0.0, 1.0);
    const AtomSet atoms = AtomSet::fourier(box, 4);
    const double cell = grid_spacing(box, default_cells(1))[0];
    const SpikeTrain truth = train_1d({0.5}, {1.0});
    const Vector y = forward(atoms, truth);
    const double lambda = 1e-4;

    SUBCASE("half a cell off moves toward the truth") {
        const SpikeTrain start = train_1d({0.5 + 0.5 * cell}, {1.0});
        const auto r = refine_positions(start, atoms, y, lambda);
        REQUIRE(r.train.size() == 1);
        CHECK(std::abs(r.train.positions(0, 0) - 0.5) < 0.5 * cell);
        CHECK(r.objective_after < r.objective_before);
    }
    SUBCASE("a stationary train stays put") {
        const auto first = refine_positions(train_1d({0.5 + 0.3 * cell}, {0.9}), atoms, y, lambda);
        const auto again = refine_positions(first.train, atoms, y, lambda);
        CHECK(std::abs(again.train.positions(0, 0) - first.train.positions(0, 0)) <= 1e-10);
        CHECK(std::abs(again.train.amplitudes[0] - first.train.amplitudes[0]) <= 1e-10);
    }
    SUBCASE("never increases the objective") {
        for (int trial = 0; trial < 20; ++trial) {
            const Vector pos = 0.5 + 0.45 * random_vector(900 + trial, 3).array().tanh();
            SpikeTrain t = train_1d({pos[0], pos[1], pos[2]}, {0.5, -0.3, 0.8});
            const Vector yy = random_vector(950 + trial, atoms.size());
            const auto r = refine_positions(t, atoms, yy, 0.05);
            CHECK(r.objective_after <= r.objective_before);
            CHECK(spike_objective(atoms, yy, 0.05, r.train) == doctest::Approx(r.objective_after));
        }
    }
    SUBCASE("hat windows are skipped with a note") {
        const AtomSet hats = AtomSet::hat_windows(box, uniform_grid(box, 5), 0.3);
        const SpikeTrain start = train_1d({0.31}, {1.0});
        const auto r = refine_positions(start, hats, Vector::Ones(5), 0.1);
        CHECK_FALSE(r.refined);
        CHECK(r.train.positions == start.positions);
        CHECK_FALSE(r.notes.empty());
    }
}

TEST_CASE("merging close spikes") {
    const SpikeTrain t = train_1d({0.30, 0.301, 0.7, 0.7005}, {1.0, 3.0, 0.5, -0.5});
    const auto m = merge_close(t, Vector::Constant(1, 0.002));
    REQUIRE(m.size() == 1);
    CHECK(m.amplitudes[0] == doctest::Approx(4.0));
    CHECK(m.positions(0, 0) == doctest::Approx(0.30075));
}

TEST_CASE("two-dimensional recovery") {
    const Box box = Box::cube(2, 0.0, 1.0);
    const AtomSet atoms = AtomSet::fourier(box, 2);
    SpikeTrain truth;
    truth.domain = box;
    truth.positions.resize(1, 2);
    truth.positions << 0.3, 0.6;
    truth.amplitudes = Vector::Constant(1, 1.0);
    const Vector y = forward(atoms, truth);
    SpikeOptions opt;
    opt.cells = 64;
    const auto r = spike_solve(atoms, y, 1e-3 * y.norm(), opt);
    CHECK(r.train.size() <= atoms.size());
    REQUIRE(r.train.size() >= 1);
    const Vector cell = grid_spacing(box, 64);
    CHECK(std::abs(r.train.positions(0, 0) - 0.3) <= cell[0]);
    CHECK(std::abs(r.train.positions(0, 1) - 0.6) <= cell[1]);
}
