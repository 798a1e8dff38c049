#include <catch2/catch_amalgamated.hpp>

#include "cylfi/model.hpp"

using namespace cylfi;

TEST_CASE("model space validates dimension and labels", "[model]") {
    CHECK_THROWS_AS(ModelSpace(0), shape_error);
    CHECK_THROWS_AS(ModelSpace(-2), shape_error);

    const ModelSpace sp(3);
    REQUIRE(sp.basis_labels.size() == 3);
    CHECK(sp.basis_labels[0] == "e1");
    CHECK(sp.basis_labels[2] == "e3");

    CHECK_THROWS_AS(ModelSpace(2, {"a"}), shape_error);
    const ModelSpace named(2, {"phi", "psi"});
    CHECK(named.basis_labels[1] == "psi");
    CHECK(same_space(sp, ModelSpace(3, {"a", "b", "c"})));
    CHECK_FALSE(same_space(sp, named));
}

TEST_CASE("test functions and projections check shapes", "[model]") {
    const ModelSpace sp(3);
    CHECK_THROWS_AS(TestFunction(sp, Eigen::VectorXcd::Zero(2)), shape_error);

    Eigen::VectorXcd c(3);
    c << cxd(1, 0), cxd(0, 2), cxd(-1, 0);
    const TestFunction f(sp, c);
    CHECK_FALSE(f.is_real());
    CHECK(TestFunction(sp, Eigen::VectorXcd::Ones(3)).is_real());

    CHECK_THROWS_AS(Projection(sp, Eigen::MatrixXd::Zero(2, 2)), shape_error);
    const Projection pi(sp, Eigen::MatrixXd::Identity(2, 3));
    CHECK(pi.arity() == 2);
    CHECK(pi.row(1).coeffs(1) == cxd(1, 0));
    CHECK_THROWS_AS(pi.row(2), shape_error);

    const Projection full = canonical_projection(sp);
    CHECK(full.arity() == 3);
    CHECK(full.rows == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("projection composition and dual application", "[model]") {
    const ModelSpace sp(3);
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 1,
            0, 2, 0;
    const Projection pi(sp, rows);

    Eigen::MatrixXd lam(1, 2);
    lam << 3, -1;
    const Projection composed = compose(LinearMap(lam), pi);
    REQUIRE(composed.arity() == 1);
    CHECK(composed.rows(0, 0) == 3.0);
    CHECK(composed.rows(0, 1) == -2.0);
    CHECK(composed.rows(0, 2) == 3.0);
    CHECK_THROWS_AS(compose(LinearMap(Eigen::MatrixXd::Ones(1, 3)), pi), shape_error);

    // w . pi = sum_j w_j f_j as a test function
    Eigen::VectorXd w(2);
    w << 1, -1;
    const TestFunction pulled = apply_projection_dual(pi, w);
    CHECK(pulled.coeffs(0) == cxd(1, 0));
    CHECK(pulled.coeffs(1) == cxd(-2, 0));
    CHECK(pulled.coeffs(2) == cxd(1, 0));
    CHECK_THROWS_AS(apply_projection_dual(pi, Eigen::VectorXd::Ones(3)), shape_error);
}

TEST_CASE("bilinear forms reject asymmetry and negative imaginary part", "[model]") {
    const ModelSpace sp(2);

    Eigen::MatrixXcd asym(2, 2);
    asym << cxd(1, 1), cxd(2, 0), cxd(3, 0), cxd(1, 1);
    CHECK_THROWS_AS(BilinearForm(sp, asym), domain_error);

    Eigen::MatrixXcd negim(2, 2);
    negim << cxd(0, -1), cxd(0, 0), cxd(0, 0), cxd(0, 1);
    CHECK_THROWS_AS(BilinearForm(sp, negim), domain_error);

    // symmetric with Im = 0 is fine (PSD includes zero)
    Eigen::MatrixXcd realsym(2, 2);
    realsym << cxd(2, 0), cxd(1, 0), cxd(1, 0), cxd(3, 0);
    const BilinearForm br(sp, realsym);
    CHECK_FALSE(br.imag_strictly_positive());

    const BilinearForm bi(sp, Eigen::MatrixXcd::Identity(2, 2) * cxd(0, 1));
    CHECK(bi.imag_strictly_positive());

    CHECK_THROWS_AS(BilinearForm(sp, Eigen::MatrixXcd::Identity(3, 3)), shape_error);
}

TEST_CASE("restrict_form is the bilinear Gram matrix, no conjugation", "[model]") {
    const ModelSpace sp(2);
    Eigen::MatrixXcd m(2, 2);
    m << cxd(1, 1), cxd(0, 0.5), cxd(0, 0.5), cxd(2, 1);
    const BilinearForm b(sp, m);

    Eigen::VectorXcd u(2), v(2);
    u << cxd(1, 0), cxd(0, 1); // complex on purpose: bilinear means u^T B u, not u^H B u
    v << cxd(0, 0), cxd(1, 0);
    const std::vector<TestFunction> funcs{TestFunction(sp, u), TestFunction(sp, v)};
    const Eigen::MatrixXcd g = restrict_form(b, funcs);

    const cxd expect_uu = m(0, 0) + cxd(0, 1) * m(0, 1) + cxd(0, 1) * m(1, 0) - m(1, 1);
    CHECK(std::abs(g(0, 0) - expect_uu) < 1e-14);
    CHECK(std::abs(g(0, 1) - (m(0, 1) + cxd(0, 1) * m(1, 1))) < 1e-14);
    CHECK(std::abs(g(0, 1) - g(1, 0)) == 0.0); // symmetrized exactly
    CHECK(std::abs(g(1, 1) - m(1, 1)) < 1e-14);

    CHECK_THROWS_AS(restrict_form(b, {}), shape_error);
    CHECK_THROWS_AS(restrict_form(b, {TestFunction(ModelSpace(3), Eigen::VectorXcd::Zero(3))}),
                    shape_error);
}
