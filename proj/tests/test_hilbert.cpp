#include "banrep/core/errors.hpp"
#include "banrep/hilbert.hpp"
#include "banrep/oracle.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

using namespace banrep;
using namespace banrep::hilbert;
using namespace banrep::testing;

TEST_CASE("gram matrix basics") {
    Points one(1, 2);
    one << 0.3, -0.2;
    CHECK(gram_matrix(Kernel::gaussian(1.0), one)(0, 0) == 1.0);

    Points dup(3, 1);
    dup << 0.0, 1.0, 1.0;
    try {
        (void)gram_matrix(Kernel::gaussian(1.0), dup);
        FAIL("expected a duplicate-site error");
    } catch (const DuplicateSite& e) {
        CHECK(e.first() == 1);
        CHECK(e.second() == 2);
    }

    const Points pts = random_matrix(8, 10, 2);
    const Matrix g = gram_matrix(Kernel::gaussian(1.0), pts);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("kernels are symmetric") {
    const Points pts = random_matrix(9, 6, 3);
    for (const Kernel& k : {Kernel::gaussian(0.7), Kernel::laplacian(1.3), Kernel::polynomial(3, 1.0),
                            Kernel::super_exponential(1.2)}) {
        for (Index i = 0; i < 6; ++i) {
            for (Index j = 0; j < 6; ++j) CHECK(k(site(pts, i), site(pts, j)) == k(site(pts, j), site(pts, i)));
        }
    }
    CHECK_THROWS_AS(Kernel::gaussian(0.0), ValidationError);
    CHECK_THROWS_AS(Kernel::polynomial(0, 1.0), ValidationError);
    CHECK_THROWS_AS(Kernel::super_exponential(2.0), ValidationError);
}

TEST_CASE("scalar closed form") {
    Points p(1, 1);
    p << 0.0;
    const auto fit = rkhs_fit(Kernel::gaussian(1.0), p, Vector::Ones(1), 1.0, Loss::quadratic());
    CHECK(fit.model.coefficients[0] == 0.5);
}

TEST_CASE("interpolation limit through continuation") {
    const Points pts = spread_sites(4, 6);
    const Vector y = random_vector(44, 6);
    const auto fit = rkhs_fit(Kernel::gaussian(1.0), pts, y, 0.0, Loss::equality());
    const Matrix g = gram_matrix(Kernel::gaussian(1.0), pts);
    CHECK((g * fit.model.coefficients - y).norm() <= 1e-6 * y.norm());
    for (Index i = 0; i < 6; ++i) CHECK(std::abs(rkhs_predict(fit.model, site(pts, i)) - y[i]) <= 1e-6);
}

TEST_CASE("huber fit reaches the frozen oracle objective") {
    const Points pts = spread_sites(12, 5);
    const Vector y = random_vector(121, 5);
    const auto fit = rkhs_fit(Kernel::gaussian(1.0), pts, y, 0.3, Loss::huber(0.5));
    const Matrix g = gram_matrix(Kernel::gaussian(1.0), pts);
    auto [f, sg] = oracle::rkhs_problem(g, y, 0.3, oracle::DataTerm::huber, 0.5);
    const double mine = f(fit.model.coefficients);
    // Subgradient oracle, 4e5 iterations.
    const double frozen = 1.4417020365082578;
    CHECK(std::abs(mine - frozen) <= 1e-6 * frozen);
    CHECK(fit.report.optimality_residual <= 1e-9);
}

TEST_CASE("prediction") {
    Points c(2, 1);
    c << 0.0, 1.0;
    const KernelModel zero{Kernel::laplacian(1.0), c, Vector::Zero(2)};
    const double x = 0.37;
    CHECK(rkhs_predict(zero, std::span<const double>(&x, 1)) == 0.0);

    const Points pts = spread_sites(5, 4);
    const Vector y = random_vector(55, 4);
    const auto fit = rkhs_fit(Kernel::gaussian(0.8), pts, y, 0.2, Loss::quadratic());
    const Vector ga = gram_matrix(Kernel::gaussian(0.8), pts) * fit.model.coefficients;
    for (Index i = 0; i < 4; ++i) CHECK(rkhs_predict(fit.model, site(pts, i)) == doctest::Approx(ga[i]).epsilon(1e-14));
    const double two[2] = {1.0, 2.0};
    CHECK_THROWS_AS((void)rkhs_predict(fit.model, std::span<const double>(two, 2)), DimensionError);
}

TEST_CASE("tikhonov closed form") {
    const Vector y = random_vector(6, 3);
    const auto id = tikhonov_fit(Matrix::Identity(3, 3), y, 0.5);
    CHECK((id.a - y / 1.5).cwiseAbs().maxCoeff() <= 1e-15);

    Matrix h(2, 2);
    h << 2, 1, 1, 2;
    const auto fit = tikhonov_fit(h, Vector::Unit(2, 0), 1.0);
    CHECK(std::abs(fit.a[0] - 0.375) <= 1e-12);
    CHECK(std::abs(fit.a[1] + 0.125) <= 1e-12);
    CHECK(fit.report.optimality_residual <= 1e-15);

    Matrix asym = h;
    asym(0, 1) += 1e-6;
    CHECK_THROWS_AS(tikhonov_fit(asym, Vector::Ones(2), 1.0), ValidationError);
    CHECK_THROWS_AS(tikhonov_fit(h, Vector::Ones(2), 0.0), ValidationError);
}

TEST_CASE("tikhonov and rkhs agree when H is the Gram matrix") {
    const Points pts = spread_sites(7, 5);
    const Vector y = random_vector(77, 5);
    const Matrix g = gram_matrix(Kernel::laplacian(1.0), pts);
    const auto a = tikhonov_fit(g, y, 0.3).a;
    const auto b = rkhs_fit(Kernel::laplacian(1.0), pts, y, 0.3, Loss::quadratic()).model.coefficients;
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    // Stationarity (G + lambda I) a = y.
    CHECK(((g + 0.3 * Matrix::Identity(5, 5)) * a - y).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("closed forms match the subgradient oracle") {
    for (int trial = 0; trial < 12; ++trial) {
        const Index m = 2 + trial % 7;
        const Points pts = spread_sites(200 + trial, m);
        const Vector y = random_vector(300 + trial, m);
        const double lambda = 0.2 + 0.1 * trial;
        const auto fit = rkhs_fit(Kernel::gaussian(1.0), pts, y, lambda, Loss::quadratic());
        const Matrix g = gram_matrix(Kernel::gaussian(1.0), pts);
        auto [f, sg] = oracle::rkhs_problem(g, y, lambda);
        const double top = std::sqrt(oracle::gram_spectral_bound(g));
        oracle::SubgradientOptions opt;
        opt.iterations = 300000;
        opt.epoch = 3000;
        opt.step = 1.0 / (2.0 * (top * top + lambda * top));
        const double ref = oracle::subgradient_minimize(f, sg, Vector::Zero(m), opt).objective;
        const double mine = f(fit.model.coefficients);
        CHECK(std::abs(ref - mine) <= 1e-6 * mine);
    }
}

TEST_CASE("regularizer value decreases as lambda grows") {
    for (int trial = 0; trial < 10; ++trial) {
        const Points pts = spread_sites(400 + trial, 6);
        const Vector y = random_vector(500 + trial, 6);
        double prev = INFINITY;
        for (double lambda = 0.01; lambda < 100.0; lambda *= 2.0) {
            const auto fit = rkhs_fit(Kernel::gaussian(1.0), pts, y, lambda, Loss::quadratic());
            const double r = rkhs_norm_squared(fit.model);
            CHECK(r <= prev * (1 + 1e-12));
            prev = r;
        }
    }
}
