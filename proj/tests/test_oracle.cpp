#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cylfi/oracle.hpp"

using namespace cylfi;

TEST_CASE("oracle convention lock: standard normal moments", "[oracle]") {
    // G = i embeds the standard normal; {1, s^2, s^4} -> {1, 1, 3}
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = cxd(0, 1);
    CHECK(std::abs(integrate_moment(g, Polynomial::constant(1, cxd(1, 0))) - cxd(1, 0)) < 1e-6);
    CHECK(std::abs(integrate_moment(g, Polynomial::monomial(1, {1, 1})) - cxd(1, 0)) < 1e-6);
    CHECK(std::abs(integrate_moment(g, Polynomial::monomial(1, {1, 1, 1, 1})) - cxd(3, 0)) < 1e-6);
    // odd moment vanishes by symmetry of the grid
    CHECK(std::abs(integrate_moment(g, Polynomial::monomial(1, {1}))) < 1e-12);
}

TEST_CASE("oracle handles complex scalar Gram values", "[oracle]") {
    // G = 1 + 0.1i: M2 = -iG = 0.1 - i, by the closed form the oracle must
    // reproduce without knowing it
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = cxd(1.0, 0.1);
    const cxd m2 = integrate_moment(g, Polynomial::monomial(1, {1, 1}));
    CHECK(std::abs(m2 - cxd(0.1, -1.0)) < 1e-9);
}

TEST_CASE("doubling the grid halves the error until the floor", "[oracle]") {
    // trapezoid on an analytic integrand converges superalgebraically; the
    // staircase must at least halve per doubling until roundoff
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = cxd(0.8, 0.5);
    const cxd truth = cxd(0, -1) * g(0, 0); // M2 = -iG
    const Polynomial p = Polynomial::monomial(1, {1, 1});

    double prev = -1.0;
    for (int npts : {11, 21, 41, 81, 161, 321}) {
        QuadratureConfig cfg;
        cfg.points_per_axis = npts;
        const double err = std::abs(integrate_moment(g, p, cfg) - truth);
        if (prev >= 0.0) CHECK(err <= std::max(prev / 2.0, 1e-8));
        prev = err;
    }
    CHECK(prev < 1e-8);
}

TEST_CASE("oracle validates configuration and domain", "[oracle]") {
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = cxd(0, 1);
    const Polynomial one = Polynomial::constant(1, cxd(1, 0));

    QuadratureConfig even;
    even.points_per_axis = 100;
    CHECK_THROWS_AS(integrate_moment(g, one, even), domain_error);
    QuadratureConfig neg;
    neg.box_halfwidth_sigmas = -1.0;
    CHECK_THROWS_AS(integrate_moment(g, one, neg), domain_error);

    // Im G = 0: no decay, not integrable by this rule
    Eigen::MatrixXcd real_g(1, 1);
    real_g(0, 0) = cxd(1, 0);
    CHECK_THROWS_AS(integrate_moment(real_g, one), domain_error);

    // dimension cap
    CHECK_THROWS_AS(integrate_moment(Eigen::MatrixXcd::Identity(4, 4) * cxd(0, 1),
                                     Polynomial::constant(4, cxd(1, 0))),
                    resource_error);
    // nvars mismatch
    CHECK_THROWS_AS(integrate_moment(g, Polynomial::constant(2, cxd(1, 0))), shape_error);
}

TEST_CASE("a too-small box is reported, not silently integrated", "[oracle]") {
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = cxd(0, 1);
    QuadratureConfig tight;
    tight.points_per_axis = 101;
    tight.box_halfwidth_sigmas = 1.5; // boundary value e^{-1.125} of peak
    CHECK_THROWS_AS(integrate_moment(g, Polynomial::constant(1, cxd(1, 0)), tight), numerical_error);
}

TEST_CASE("batch monomial integration equals one-at-a-time", "[oracle]") {
    Eigen::MatrixXcd g(2, 2);
    g << cxd(0.3, 1.0), cxd(0.1, 0.2),
         cxd(0.1, 0.2), cxd(-0.2, 0.8);
    QuadratureConfig cfg;
    cfg.points_per_axis = 201;

    const std::vector<IndexTuple> tuples{{1, 1}, {1, 2}, {2, 2}, {1, 1, 2, 2}, {1, 1, 1, 1}};
    const std::vector<cxd> batch = integrate_monomials(g, tuples, cfg);
    REQUIRE(batch.size() == tuples.size());
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        const cxd single = integrate_moment(g, Polynomial::monomial(2, tuples[r]), cfg);
        CHECK(std::abs(batch[r] - single) < 1e-13);
    }

    CHECK_THROWS_AS(integrate_monomials(g, {{1, 3}}, cfg), shape_error);
}

TEST_CASE("extrapolate_eps recovers polynomial limits", "[oracle]") {
    // f(eps) = 2 - 3 eps: order 1 through the two smallest is exact
    auto linear = [](double e) { return EpsSample{e, cxd(2.0 - 3.0 * e, 0)}; };
    const std::vector<EpsSample> lin{linear(0.2), linear(0.1), linear(0.05), linear(0.025)};
    const Extrapolation ex1 = extrapolate_eps(lin, 1);
    CHECK(std::abs(ex1.value - cxd(2, 0)) < 1e-14);
    CHECK(ex1.residual < 1e-13);

    // f(eps) = 1 + eps^2: order 1 leaves O(eps^2), order 2 is exact
    auto quad = [](double e) { return EpsSample{e, cxd(1.0 + e * e, 0)}; };
    const std::vector<EpsSample> q{quad(0.2), quad(0.1), quad(0.05), quad(0.025)};
    const Extrapolation ex_lin = extrapolate_eps(q, 1);
    CHECK(std::abs(ex_lin.value - cxd(1, 0)) > 1e-5); // honest leftover
    CHECK(ex_lin.residual > 1e-6);                    // and the residual says so
    const Extrapolation ex_quad = extrapolate_eps(q, 2);
    CHECK(std::abs(ex_quad.value - cxd(1, 0)) < 1e-13);

    // samples arrive in any order
    std::vector<EpsSample> shuffled{quad(0.05), quad(0.2), quad(0.025), quad(0.1)};
    CHECK(std::abs(extrapolate_eps(shuffled, 2).value - ex_quad.value) < 1e-15);
}

TEST_CASE("extrapolate_eps validates samples", "[oracle]") {
    auto s = [](double e, double v) { return EpsSample{e, cxd(v, 0)}; };
    CHECK_THROWS_AS(extrapolate_eps({s(0.1, 1), s(0.05, 1)}, 1), insufficient_data_error);
    CHECK_THROWS_AS(extrapolate_eps({s(-0.1, 1), s(0.05, 1), s(0.025, 1)}, 1), domain_error);
    CHECK_THROWS_AS(extrapolate_eps({s(0.1, 1), s(0.1, 1), s(0.025, 1)}, 1), numerical_error);
}
