#include "banrep/core/errors.hpp"
#include "banrep/core/linalg.hpp"
#include "banrep/lp.hpp"
#include "banrep/oracle.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

using namespace banrep;
using namespace banrep::lp;
using namespace banrep::testing;

namespace {

Matrix row12() {
    Matrix h(1, 2);
    h << 1.0, 2.0;
    return h;
}

}  // namespace

TEST_CASE("ridge closed form") {
    const Vector y = random_vector(1, 5);
    for (double lambda : {0.1, 1.0, 3.0}) {
        const auto r = lp_primal_solve(Matrix::Identity(5, 5), y, lambda, 2.0, Loss::quadratic());
        CHECK((r.solution.s - y / (1.0 + lambda)).cwiseAbs().maxCoeff() <= 1e-12);
        const Vector a = dual_certificate(r.solution, Matrix::Identity(5, 5), y, lambda, Loss::quadratic());
        CHECK((a - r.solution.s).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("H = [1, 2], y = 2, p = 1") {
    // With E = ||y - Hx||^2 the one-dimensional optimum is x2 = 1 - lambda / 8.
    for (double lambda : {0.5, 1.0, 2.0, 6.0}) {
        const auto r = lp_primal_solve(row12(), Vector::Constant(1, 2.0), lambda, 1.0, Loss::quadratic());
        CHECK(std::abs(r.solution.s[0]) <= 1e-12);
        CHECK(r.solution.s[1] == doctest::Approx(1.0 - lambda / 8.0).epsilon(1e-10));
        REQUIRE(r.solution.support.size() == 1);
        CHECK(r.solution.support[0] == 1);
        const auto en = oracle::enumerate_support_solve(row12(), Vector::Constant(1, 2.0), lambda, 2);
        CHECK(std::abs(en.objective - r.report.objective) <= 1e-8);
    }
}

TEST_CASE("p = 1.5 matches the frozen oracle objective") {
    const Matrix h = random_matrix(11, 3, 8);
    const Vector y = random_vector(111, 3);
    const auto r = lp_primal_solve(h, y, 0.5, 1.5, Loss::quadratic());
    // Subgradient oracle, 3e5 iterations.
    const double frozen = 0.79273135441659437;
    CHECK(std::abs(r.report.objective - frozen) <= 1e-6 * frozen);
    CHECK(r.report.optimality_residual <= 1e-9 * stationarity_scale(h, y, Loss::quadratic()));
}

TEST_CASE("p < 1 is refused") {
    CHECK_THROWS_AS(lp_primal_solve(row12(), Vector::Ones(1), 1.0, 0.5, Loss::quadratic()), UnsupportedExponent);
    CHECK_THROWS_AS(lp_primal_solve(row12(), Vector::Ones(1), 0.0, 1.0, Loss::quadratic()), ValidationError);
}

TEST_CASE("certificate for p = 2 lies in the row span") {
    const Matrix h = random_matrix(21, 3, 7);
    const Vector y = random_vector(22, 3);
    const auto r = lp_primal_solve(h, y, 0.4, 2.0, Loss::quadratic());
    const Vector a = dual_certificate(r.solution, h, y, 0.4, Loss::quadratic());
    CHECK((h.transpose() * a - r.solution.s).cwiseAbs().maxCoeff() <= 1e-8);
    const Eigen::ColPivHouseholderQR<Matrix> qr(h.transpose());
    const Vector coef = qr.solve(r.solution.s);
    CHECK((h.transpose() * coef - r.solution.s).norm() <= 1e-8);
}

TEST_CASE("certificate for p = 3 satisfies the KKT identity") {
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix h = random_matrix(30 + trial, 4, 9);
        const Vector y = random_vector(60 + trial, 4);
        const auto r = lp_primal_solve(h, y, 0.3, 3.0, Loss::quadratic());
        const Vector a = dual_certificate(r.solution, h, y, 0.3, Loss::quadratic());
        const double scale = stationarity_scale(h, y, Loss::quadratic());
        CHECK(certificate_residual(r.solution.s, h, a, 3.0) <= 1e-7 * scale);
        const Vector back = primal_from_certificate(h, a, 3.0);
        CHECK((back - r.solution.s).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + r.solution.s.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("certificate is refused away from stationarity") {
    const Matrix h = random_matrix(5, 3, 4);
    const Vector y = random_vector(6, 3);
    LpSolution bogus{Vector::Ones(4), std::nullopt, 2.0, {}};
    CHECK_THROWS_AS(dual_certificate(bogus, h, y, 0.2, Loss::quadratic()), NumericError);
}

TEST_CASE("certificate after rescaling lambda") {
    const Matrix h = random_matrix(41, 3, 6);
    const Vector y = h * random_vector(42, 6);
    for (double lambda : {0.05, 0.1, 0.2}) {
        const auto r = lp_primal_solve(h, y, lambda, 1.5, Loss::quadratic());
        const Vector a = dual_certificate(r.solution, h, y, lambda, Loss::quadratic());
        CHECK(certificate_residual(r.solution.s, h, a, 1.5) <= 1e-7 * stationarity_scale(h, y, Loss::quadratic()));
    }
}

TEST_CASE("huber loss with p = 3") {
    const Matrix h = random_matrix(51, 5, 8);
    const Vector y = 3.0 * random_vector(52, 5);
    const auto r = lp_primal_solve(h, y, 0.2, 3.0, Loss::huber(0.4));
    auto [f, g] = oracle::lp_problem(h, y, 0.2, 3.0, oracle::DataTerm::huber, 0.4);
    CHECK(f(r.solution.s) == doctest::Approx(r.report.objective).epsilon(1e-12));
    oracle::SubgradientOptions opt;
    opt.iterations = 200000;
    opt.epoch = 3000;
    opt.step = 0.05;
    const double ref = oracle::subgradient_minimize(f, g, Vector::Zero(8), opt).objective;
    CHECK(r.report.objective <= ref * (1 + 1e-6));
}

TEST_CASE("solutions for p > 1 do not depend on the start") {
    for (int trial = 0; trial < 20; ++trial) {
        const double p = trial % 2 ? 1.5 : 3.0;
        const Matrix h = random_matrix(100 + trial, 3, 6);
        const Vector y = random_vector(200 + trial, 3);
        LpOptions a_opt, b_opt;
        a_opt.initial = random_vector(300 + trial, 6);
        b_opt.initial = 5.0 * random_vector(400 + trial, 6);
        const Vector sa = lp_primal_solve(h, y, 0.3, p, Loss::quadratic(), a_opt).solution.s;
        const Vector sb = lp_primal_solve(h, y, 0.3, p, Loss::quadratic(), b_opt).solution.s;
        CHECK((sa - sb).norm() <= 1e-7 * std::max(1.0, sa.norm()));
    }
}

TEST_CASE("l1 optimality and agreement with enumeration") {
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix h = random_matrix(500 + trial, 3, 7);
        const Vector y = random_vector(600 + trial, 3);
        const double lambda = 0.1 + 0.05 * trial;
        const auto r = lp_primal_solve(h, y, lambda, 1.0, Loss::quadratic());
        const Vector g = -h.transpose() * Loss::quadratic().gradient(y, h * r.solution.s);
        for (Index n = 0; n < 7; ++n) {
            if (r.solution.s[n] == 0.0) CHECK(std::abs(g[n]) <= lambda * (1 + 1e-6));
            else CHECK(g[n] * (r.solution.s[n] > 0 ? 1.0 : -1.0) == doctest::Approx(lambda).epsilon(1e-6));
        }
        const auto en = oracle::enumerate_support_solve(h, y, lambda, 3);
        CHECK(std::abs(en.objective - r.report.objective) <= 1e-8 * std::max(1.0, en.objective));
    }
}

TEST_CASE("pruning examples") {
    Matrix h(1, 2);
    h << 1.0, 1.0;
    LpSolution tie{Vector::Constant(2, 0.7), std::nullopt, 1.0, {0, 1}};
    const auto pruned = prune_to_extreme(tie, h);
    // The tie drops the lowest index.
    CHECK(pruned.s[0] == 0.0);
    CHECK(pruned.s[1] == doctest::Approx(1.4));
    CHECK((h * pruned.s)[0] == doctest::Approx(1.4));
    CHECK(pruned.s.lpNorm<1>() == doctest::Approx(1.4));
    REQUIRE(pruned.support.size() == 1);
    CHECK(pruned.support[0] == 1);

    LpSolution small{Vector::Unit(2, 1), std::nullopt, 1.0, {1}};
    CHECK(prune_to_extreme(small, h).s == small.s);
}

TEST_CASE("pruning a degenerate 2 x 6 instance") {
    // Duplicated columns make the l1 minimizer non-unique.
    Matrix base = random_matrix(13, 2, 3);
    Matrix h(2, 6);
    h << base, base;
    const Vector y = random_vector(131, 2);
    const double lambda = 0.3;
    LpOptions opt;
    opt.polish = false;
    const auto r = lp_primal_solve(h, y, lambda, 1.0, Loss::quadratic(), opt);
    const auto pruned = prune_to_extreme(r.solution, h);
    CHECK(pruned.support.size() <= 2);
    CHECK((h * pruned.s - h * r.solution.s).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(std::abs(pruned.s.lpNorm<1>() - r.solution.s.lpNorm<1>()) <= 1e-9);
    const double before = lp_objective(h, y, lambda, 1.0, Loss::quadratic(), r.solution.s);
    const double after = lp_objective(h, y, lambda, 1.0, Loss::quadratic(), pruned.s);
    CHECK(std::abs(after - before) <= 1e-9);
    const auto en = oracle::enumerate_support_solve(h, y, lambda, 2);
    CHECK(std::abs(after - en.objective) <= 1e-8);
}

TEST_CASE("pruning bounds the support on random instances") {
    for (int trial = 0; trial < 30; ++trial) {
        const Index m = 2 + trial % 3;
        const Matrix h = random_matrix(700 + trial, m, 10);
        const Vector y = random_vector(800 + trial, m);
        const auto r = lp_primal_solve(h, y, 0.05, 1.0, Loss::quadratic());
        const auto pruned = prune_to_extreme(r.solution, h);
        CHECK(static_cast<Index>(pruned.support.size()) <= m);
    }
}

TEST_CASE("objective gradient matches finite differences") {
    const Matrix h = random_matrix(90, 4, 5);
    const Vector y = random_vector(91, 4);
    for (int i = 0; i < 100; ++i) {
        const Vector x = random_vector(1000 + i, 5);
        const double p = i % 2 ? 1.5 : 3.0;
        const double eps = i % 2 ? 1e-2 : 0.0;
        const Loss loss = i % 4 < 2 ? Loss::quadratic() : Loss::huber(0.3);
        auto f = [&](const Vector& v) {
            double s = loss.evaluate(y, h * v);
            for (Index n = 0; n < v.size(); ++n) s += 0.4 * smoothed_power(v[n], p, eps);
            return s;
        };
        const Vector fd = oracle::finite_diff_grad(f, x);
        CHECK((fd - objective_gradient(h, y, 0.4, p, loss, x, eps)).cwiseAbs().maxCoeff() <= 1e-5);
    }
    CHECK_THROWS_AS(objective_gradient(h, y, 0.4, 1.0, Loss::quadratic(), Vector::Zero(5)), UnsupportedExponent);
}
