#include "banrep/core/errors.hpp"
#include "banrep/core/linalg.hpp"
#include "banrep/duality.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

using namespace banrep;
using namespace banrep::duality;
using banrep::testing::random_vector;

TEST_CASE("single-support vectors are fixed points") {
    for (double p : {1.1, 1.5, 2.0, 3.0, 7.0}) {
        Vector x = Vector::Zero(4);
        x[2] = -2.5;
        const Vector xs = lp_conjugate(x, p);
        CHECK((xs - x).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("p = 2 is the identity") {
    const Vector x = random_vector(4, 9);
    CHECK(lp_conjugate(x, 2.0) == x);
    CHECK(lp_conjugate(x, 2.0 + 1e-10) == x);
}

TEST_CASE("x = (1, 1), p = 3") {
    const Vector x = Vector::Ones(2);
    const Vector xs = lp_conjugate(x, 3.0);
    CHECK(xs[0] == doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-15));
    CHECK(xs[1] == doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-15));
    CHECK(linalg::lp_norm(xs, 1.5) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-14));
    CHECK(linalg::lp_norm(x, 3.0) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-14));
    const auto pair = make_conjugate_pair(x, 3.0);
    CHECK(pair.q == doctest::Approx(1.5));
    CHECK(pair.norm_residual() <= 1e-15);
    CHECK(pair.duality_residual() <= 1e-15);
}

TEST_CASE("zero maps to zero; set-valued exponents are refused") {
    CHECK(lp_conjugate(Vector::Zero(3), 3.0) == Vector::Zero(3));
    CHECK_THROWS_AS(lp_conjugate(Vector::Ones(2), 1.0), UnsupportedExponent);
    CHECK_THROWS_AS(lp_conjugate(Vector::Ones(2), 0.5), UnsupportedExponent);
    CHECK_THROWS_AS(lp_conjugate(Vector::Ones(2), INFINITY), UnsupportedExponent);
}

TEST_CASE("no overflow for huge entries") {
    Vector x(2);
    x << 1e300, -3e299;
    const Vector xs = lp_conjugate(x, 4.0);
    CHECK(xs.allFinite());
    CHECK(linalg::lp_norm(xs, 4.0 / 3.0) == doctest::Approx(linalg::lp_norm(x, 4.0)).epsilon(1e-12));
}

TEST_CASE("check_conjugate_pair examples") {
    const Vector ones = Vector::Ones(2);
    CHECK(check_conjugate_pair(ones, ones, 2.0, 1e-12).pass);
    Vector e0(2);
    e0 << 1.0, 0.0;
    const auto bad = check_conjugate_pair(ones, e0, 2.0, 1e-12);
    CHECK_FALSE(bad.pass);
    CHECK(bad.norm_residual == doctest::Approx(std::sqrt(2.0) - 1.0));
    const Vector s = Vector::Constant(2, std::pow(2.0, -1.0 / 3.0));
    CHECK(check_conjugate_pair(ones, s, 3.0, 1e-12).pass);
}

TEST_CASE("homogeneity, involution and the pairing identity") {
    for (int trial = 0; trial < 200; ++trial) {
        const double p = 1.2 + 0.3 * (trial % 10);
        const double q = conjugate_exponent(p);
        const Vector x = random_vector(trial, 1 + trial % 12);
        const Vector xs = lp_conjugate(x, p);
        const double c = -3.0 + 0.05 * trial;
        const Vector scaled = lp_conjugate(Vector(c * x), p);
        if (c != 0.0) CHECK((scaled - c * xs).cwiseAbs().maxCoeff() <= 1e-12 * std::abs(c) * xs.cwiseAbs().maxCoeff());
        CHECK((lp_conjugate(xs, q) - x).cwiseAbs().maxCoeff() <= 1e-10 * x.cwiseAbs().maxCoeff());
        const double np = linalg::lp_norm(x, p);
        CHECK(std::abs(xs.dot(x) - np * np) <= 1e-12 * np * np);
    }
}

TEST_CASE("holder pairing") {
    const Vector ones = Vector::Ones(2);
    const auto eq = holder_pairing(ones, ones, 2.0);
    CHECK(eq.pairing == doctest::Approx(2.0));
    CHECK(std::abs(eq.slack) <= 1e-15);
    Vector a(2), b(2);
    a << 1, 0;
    b << 0, 1;
    const auto orth = holder_pairing(a, b, 2.0);
    CHECK(orth.pairing == 0.0);
    CHECK(orth.slack == doctest::Approx(1.0));
    for (int i = 0; i < 1000; ++i) {
        const double p = (i % 3 == 0) ? 1.25 : (i % 3 == 1 ? 1.5 : 3.0);
        const auto h = holder_pairing(random_vector(i, 6), random_vector(i + 5000, 6), p);
        CHECK(h.slack >= -1e-12 * h.scale);
    }
}

TEST_CASE("polarization form") {
    Vector x(2), y(2);
    x << 1, 2;
    y << 3, -1;
    CHECK(polarization_inner(x, y, 2.0) == doctest::Approx(1.0));
    for (int i = 0; i < 100; ++i) {
        const Vector u = random_vector(i, 5);
        const Vector v = random_vector(i + 100, 5);
        const double p = 1.3 + 0.2 * (i % 10);
        CHECK(polarization_inner(u, v, p) == polarization_inner(v, u, p));
    }
    for (double p : {1.5, 3.0}) {
        const auto w = find_polarization_witness(p, 3, 2000, 17);
        const double defect = std::abs(polarization_inner(w.x + w.z, w.y, p) - polarization_inner(w.x, w.y, p) -
                                       polarization_inner(w.z, w.y, p));
        CHECK(defect > 1e-3);
        CHECK(defect == doctest::Approx(w.defect));
        const auto c = find_conjugate_witness(p, 3, 2000, 17);
        CHECK(c.defect > 1e-3);
    }
    CHECK(find_conjugate_witness(2.0, 3, 200, 17).defect <= 1e-12);
}

TEST_CASE("weighted conjugate matches the sampled-grid identities") {
    const Vector x = random_vector(3, 7);
    const Vector w = Vector::Constant(7, 0.1);
    const double p = 3.0;
    const double q = conjugate_exponent(p);
    const Vector xs = lp_conjugate(x, w, p);
    const double np = weighted_lp_norm(x, w, p);
    CHECK(weighted_lp_norm(xs, w, q) == doctest::Approx(np).epsilon(1e-12));
    double pairing = 0.0;
    for (Index i = 0; i < 7; ++i) pairing += w[i] * xs[i] * x[i];
    CHECK(pairing == doctest::Approx(np * np).epsilon(1e-12));
}
