#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cylfi/distribution.hpp"
#include "cylfi/kernels.hpp"

using namespace cylfi;

TEST_CASE("distribution kinds expose their spaces and degrees", "[distribution]") {
    const ModelSpace sp(2);
    const CylDistribution g =
        CylDistribution::gaussian(BilinearForm(sp, Eigen::MatrixXcd::Identity(2, 2) * cxd(0, 1)), 6);
    CHECK(g.kind() == CylDistribution::Kind::gaussian);
    CHECK(g.space().dim == 2);
    CHECK(g.max_degree() == 6);
    CHECK_THROWS_AS(g.limit_spec(), domain_error);
    CHECK_THROWS_AS(g.project_with_diagnostics(canonical_projection(sp)), domain_error);

    const CylDistribution m = CylDistribution::measure(sp, Eigen::MatrixXd::Identity(2, 2), 4);
    CHECK(m.kind() == CylDistribution::Kind::measure_backed);

    const BilinearForm real1(ModelSpace(1), Eigen::MatrixXcd::Identity(1, 1));
    const CylDistribution l =
        CylDistribution::limit(ImaginaryGaussianSpec(real1, {0.2, 0.1, 0.05}, 1, Eigen::MatrixXd(), 4));
    CHECK(l.kind() == CylDistribution::Kind::limit_family);
    CHECK(l.max_degree() == 4);
    CHECK_THROWS_AS(l.gaussian_spec(), domain_error);
}

TEST_CASE("compatibility residual vanishes across kinds", "[distribution]") {
    std::mt19937_64 rng(60221023);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    auto random_rows = [&](int r, int c) {
        Eigen::MatrixXd m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = u(rng);
        return m;
    };

    // gaussian kind
    Eigen::MatrixXd re = random_rows(3, 3);
    re = ((re + re.transpose()) / 2.0).eval();
    Eigen::MatrixXd rr = random_rows(3, 3);
    const Eigen::MatrixXd im =
        0.5 * Eigen::MatrixXd::Identity(3, 3) + rr * rr.transpose() / 3.0;
    const BilinearForm b(ModelSpace(3), re.cast<cxd>() + cxd(0, 1) * im.cast<cxd>());
    const CylDistribution g = CylDistribution::gaussian(b, 5);
    for (int rep = 0; rep < 10; ++rep) {
        const Projection pi(ModelSpace(3), random_rows(2, 3));
        const LinearMap lam(random_rows(2, 2));
        CHECK(check_compatibility(g, pi, lam) < 1e-11);
    }

    // measure kind
    const CylDistribution meas = klein_gordon_euclidean({3, 1.0, 1.0}, 4);
    for (int rep = 0; rep < 5; ++rep) {
        const Projection pi(meas.space(), random_rows(2, 3));
        const LinearMap lam(random_rows(3, 2));
        CHECK(check_compatibility(meas, pi, lam) < 1e-12);
    }

    // limit kind: compatibility survives the extrapolation because every
    // member of the family is itself compatible
    const CylDistribution lim = klein_gordon_minkowski({2, 1.0, 1.0}, default_eps_schedule(), 1, 4);
    for (int rep = 0; rep < 5; ++rep) {
        const Projection pi(lim.space(), random_rows(2, 2));
        const LinearMap lam(random_rows(2, 2));
        CHECK(check_compatibility(lim, pi, lam) < 1e-10);
    }
}

TEST_CASE("green functions pair against contraction tensors", "[distribution]") {
    const CylDistribution mu = klein_gordon_euclidean({2, 1.0, 1.0}, 4);

    // F2 = i^2 M2 = -C
    const SymTensor f2 = green_function(mu, 2);
    CHECK(std::abs(f2.at({1, 1}) - cxd(-0.6, 0)) < 1e-14);
    CHECK(std::abs(f2.at({1, 2}) - cxd(-0.4, 0)) < 1e-14);
    CHECK(green_function(mu, 1).is_zero());
    CHECK(green_function(mu, 3).is_zero());
    CHECK(green_function(mu, 0).at({}) == cxd(1, 0));

    // <F2, phi (x) phi> with phi = (1, -1): quadratic form against -C
    Eigen::VectorXcd phi(2);
    phi << cxd(1, 0), cxd(-1, 0);
    const SymTensor g = tensor_power(phi, 2);
    const cxd paired = pair_green(mu, 2, g);
    // -(C11 - 2 C12 + C22) = -(0.6 - 0.8 + 0.6)
    CHECK(std::abs(paired - cxd(-0.4, 0)) < 1e-14);

    CHECK_THROWS_AS(pair_green(mu, 2, SymTensor(3, 2)), shape_error);
    CHECK_THROWS_AS(pair_green(mu, 3, g), shape_error);
    CHECK_THROWS_AS(green_function(mu, 5), truncation_error);
}

TEST_CASE("pair_green matches evaluation through the coefficient map", "[distribution]") {
    // <F_k, g> for g built from a polynomial's rank-k tensor equals i^k
    // times the moment evaluation of that homogeneous piece
    const ModelSpace sp(2);
    Eigen::MatrixXcd bm(2, 2);
    bm << cxd(0.2, 0.9), cxd(-0.1, 0.15),
          cxd(-0.1, 0.15), cxd(0.4, 1.1);
    const CylDistribution mu = CylDistribution::gaussian(BilinearForm(sp, bm), 4);

    Polynomial p(2);
    p.add_term({2, 0}, cxd(1.5, 0));
    p.add_term({1, 1}, cxd(-2, 0.5));
    p.add_term({0, 2}, cxd(0.25, 0));
    const auto tensors = fourier_poly(p);

    const cxd via_green = pair_green(mu, 2, tensors[2]);
    const cxd via_eval =
        evaluate(mu.project(canonical_projection(sp)), p) * cxd(-1, 0); // i^2 = -1
    CHECK(std::abs(via_green - via_eval) < 1e-13);
}
