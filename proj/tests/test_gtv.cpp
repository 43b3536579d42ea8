#include "banrep/core/errors.hpp"
#include "banrep/gtv.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

using namespace banrep;
using namespace banrep::gtv;
using namespace banrep::testing;

namespace {

Points column(std::initializer_list<double> v) {
    Points p(static_cast<Index>(v.size()), 1);
    Index i = 0;
    for (double x : v) p(i++, 0) = x;
    return p;
}

Points linspace(double lo, double hi, Index n) {
    Points p(n, 1);
    for (Index i = 0; i < n; ++i) p(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return p;
}

double abs_sum(const Vector& a) {
    double s = 0.0;
    for (Index k = 0; k < a.size(); ++k) s += std::abs(a[k]);
    return s;
}

}  // namespace

TEST_CASE("super-exponential kernel") {
    const auto k = kernel_from_operator(OperatorSpec::super_exponential(1.0));
    CHECK(k.radial(0.0) == 1.0);
    CHECK(k.radial(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(k.samples[(k.samples.size() - 1) / 2] == 1.0);
    CHECK(k.width() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(OperatorSpec::super_exponential(2.0), AdmissibilityError);
    CHECK_THROWS_AS(OperatorSpec::super_exponential(0.0), AdmissibilityError);
}

TEST_CASE("kernel from 1 + w^2") {
    const auto k = kernel_from_operator(OperatorSpec::from_frequency_response([](double w) { return 1.0 + w * w; }));
    CHECK(k.band_limit > 0.0);
    CHECK(1.0 / (1.0 + k.band_limit * k.band_limit) <= kBandTolerance);
    CHECK(k.frequency_spacing == doctest::Approx(M_PI / k.extent));
    double worst = 0.0;
    for (double x = -5.0; x <= 5.0; x += 0.01) {
        const double exact = 0.5 * std::exp(-std::abs(x));
        worst = std::max(worst, std::abs(k(std::span<const double>(&x, 1)) - exact));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("operator errors") {
    CHECK_THROWS_AS(kernel_from_operator(OperatorSpec::from_frequency_response([](double w) { return w * w; })),
                    AdmissibilityError);
    CHECK_THROWS_AS(kernel_from_operator(OperatorSpec::direct([](double) { return 1.0; })), ValidationError);
    KernelGrid bad{1.0, 0.5};
    CHECK_THROWS_AS(kernel_from_operator(OperatorSpec::super_exponential(1.0), bad), ValidationError);
}

TEST_CASE("round trip through the frequency response") {
    const KernelGrid fine{1e-4, 20.0};
    const auto k = kernel_from_operator(OperatorSpec::direct([](double r) { return 0.5 * std::exp(-r); }), fine);
    double worst = 0.0;
    for (double w = -10.0; w <= 10.0; w += 0.25) {
        worst = std::max(worst, std::abs(infer_frequency_response(k, w) / (1.0 + w * w) - 1.0));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("zero data gives the empty model") {
    const auto k = kernel_from_operator(OperatorSpec::super_exponential(1.0));
    const Points x = column({0.0, 1.0, 2.0});
    const auto fit = gtv_fit(x, Vector::Zero(3), k, default_center_grid(x, k), 0.1);
    CHECK(fit.model.size() == 0);
    CHECK(fit.model.reg_cost == 0.0);
    const double at = 0.5;
    CHECK(gtv_predict(fit.model, std::span<const double>(&at, 1)) == 0.0);
    CHECK_THROWS_AS(gtv_fit(x, Vector::Zero(3), k, x, 0.0), ValidationError);
}

TEST_CASE("single data point gives the soft threshold") {
    const auto k = kernel_from_operator(OperatorSpec::super_exponential(1.0));
    const Points x = column({0.0});
    const Points centers = linspace(-1.0, 1.0, 21);
    for (double y : {1.0, -0.7}) {
        const double lambda = 0.05;
        const auto fit = gtv_fit(x, Vector::Constant(1, y), k, centers, lambda);
        REQUIRE(fit.model.size() == 1);
        CHECK(fit.model.centers(0, 0) == 0.0);
        CHECK(fit.model.coefficients[0] == doctest::Approx(y - 0.5 * lambda * (y > 0 ? 1 : -1)).epsilon(1e-9));
    }
}

TEST_CASE("fits are sparse and honour the cost identity") {
    for (int trial = 0; trial < 8; ++trial) {
        const double alpha = 1.0 + 0.12 * trial;
        const auto k = kernel_from_operator(OperatorSpec::super_exponential(alpha));
        const Index m = 4 + trial;
        const Points x = spread_sites(70 + trial, m);
        const Vector y = random_vector(80 + trial, m);
        const Points centers = default_center_grid(x, k, 64);
        const double lambda = 0.02;
        const auto fit = gtv_fit(x, y, k, centers, lambda);
        CHECK(fit.model.size() <= m);
        CHECK(fit.model.reg_cost == abs_sum(fit.model.coefficients));
        // The reported objective uses the same regularizer.
        Vector pred(m);
        for (Index i = 0; i < m; ++i) pred[i] = gtv_predict(fit.model, site(x, i));
        CHECK(fit.report.objective == doctest::Approx((y - pred).squaredNorm() + lambda * fit.model.reg_cost).epsilon(1e-9));
    }
}

TEST_CASE("prediction") {
    const auto k = kernel_from_operator(OperatorSpec::super_exponential(1.0));
    GtvModel spike{k, column({0.0}), Vector::Ones(1), 1.0};
    const double one = 1.0;
    CHECK(gtv_predict(spike, std::span<const double>(&one, 1)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    const double far = 50.0;
    CHECK(gtv_predict(spike, std::span<const double>(&far, 1)) < 1e-20);

    // Sampled kernel: prediction at the data sites reproduces D a.
    const auto numeric = kernel_from_operator(OperatorSpec::from_frequency_response([](double w) { return 1.0 + w * w; }));
    const Points x = spread_sites(9, 6);
    const Vector y = random_vector(99, 6);
    const Points centers = default_center_grid(x, numeric, 48);
    const auto fit = gtv_fit(x, y, numeric, centers, 0.01);
    const Vector da = dictionary(numeric, x, fit.model.centers) * fit.model.coefficients;
    for (Index i = 0; i < 6; ++i) CHECK(std::abs(gtv_predict(fit.model, site(x, i)) - da[i]) <= 1e-6);
}

TEST_CASE("shifting sites and centers together keeps the coefficients") {
    const auto k = kernel_from_operator(OperatorSpec::super_exponential(1.3));
    const Points x = spread_sites(5, 7);
    const Vector y = random_vector(55, 7);
    const Points centers = default_center_grid(x, k, 40);
    const double shift = 0.75;  // dyadic, so translation is exact
    const Points xs = (x.array() + shift).matrix();
    const Points cs = (centers.array() + shift).matrix();
    const auto a = gtv_fit(x, y, k, centers, 0.03);
    const auto b = gtv_fit(xs, y, k, cs, 0.03);
    REQUIRE(a.model.size() == b.model.size());
    CHECK((a.model.coefficients - b.model.coefficients).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("coarse center grid warns") {
    const auto k = kernel_from_operator(OperatorSpec::super_exponential(1.0));
    const Points x = column({0.0, 0.1});
    const Vector y = Vector::Constant(2, 1.0);
    const Points far = column({25.0, 26.0});
    const auto fit = gtv_fit(x, y, k, far, 0.5);
    bool warned = false;
    for (const auto& n : fit.report.notes) warned = warned || n.rfind("warning", 0) == 0;
    CHECK(warned);
    const auto ok = gtv_fit(x, y, k, default_center_grid(x, k, 32), 0.5);
    for (const auto& n : ok.report.notes) CHECK(n.rfind("warning", 0) != 0);
}

TEST_CASE("two-dimensional fit") {
    const auto k = kernel_from_operator(OperatorSpec::super_exponential(1.0, 2));
    const Points x = random_matrix(3, 6, 2);
    const Vector y = random_vector(33, 6);
    const Points centers = default_center_grid(x, k, 16);
    CHECK(centers.rows() == 256);
    const auto fit = gtv_fit(x, y, k, centers, 0.02);
    CHECK(fit.model.size() <= 6);
    CHECK(fit.model.reg_cost == abs_sum(fit.model.coefficients));
}

TEST_CASE("slowly decaying kernels need a wider grid") {
    CHECK_THROWS_AS(kernel_from_operator(OperatorSpec::super_exponential(0.5)), ValidationError);
    CHECK_NOTHROW(kernel_from_operator(OperatorSpec::super_exponential(0.5), KernelGrid{0.05, 400.0}));
}
