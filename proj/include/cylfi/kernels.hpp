#pragma once

// Worked field-theory inputs on a periodic 1d lattice of N sites with
// spacing h: the discrete Laplacian
//
//     (-Delta_h)_jk = (2 delta_jk - delta_{j,k+1} - delta_{j,k-1}) / h^2   (mod N),
//
// the euclidean Klein-Gordon covariance C = (-Delta_h + m^2)^-1 with its
// measure-backed distribution B = i C, and the minkowskian form B = C fed
// through the oscillatory eps family.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/distribution.hpp"
#include "cylfi/errors.hpp"
#include "cylfi/gaussian.hpp"
#include "cylfi/model.hpp"

namespace cylfi {

struct LatticeSpec {
    int sites;
    double spacing = 1.0;
    double mass = 1.0;

    void validate() const {
        if (sites < 2) throw shape_error("LatticeSpec: need at least 2 sites");
        if (!(spacing > 0.0)) throw domain_error("LatticeSpec: spacing must be positive");
        if (!(mass >= 0.0)) throw domain_error("LatticeSpec: mass must be >= 0");
    }
};

inline ModelSpace lattice_space(const LatticeSpec& lat) {
    lat.validate();
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(lat.sites));
    for (int j = 0; j < lat.sites; ++j) labels.push_back("x" + std::to_string(j));
    return ModelSpace(lat.sites, std::move(labels));
}

// -Delta_h + m^2, periodic. For N = 2 each site has the same neighbour on
// both sides, so the off-diagonal doubles.
inline Eigen::MatrixXd lattice_operator(const LatticeSpec& lat) {
    lat.validate();
    const int n = lat.sites;
    const double w = 1.0 / (lat.spacing * lat.spacing);
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        op(j, j) = 2.0 * w + lat.mass * lat.mass;
        op(j, (j + 1) % n) -= w;
        op((j + 1) % n, j) -= w;
    }
    return op;
}

// Euclidean covariance (-Delta_h + m^2)^-1. Singular operators (massless
// periodic lattices have the constant zero mode) are refused.
inline Eigen::MatrixXd lattice_covariance(const LatticeSpec& lat) {
    const Eigen::MatrixXd op = lattice_operator(lat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    if (ev.cwiseAbs().minCoeff() <= 1e-12 * emax)
        throw domain_error("lattice_covariance: operator is singular (massless zero mode?)");
    return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

// Classical euclidean lattice field: real Gaussian measure with
// covariance (-Delta_h + m^2)^-1.
inline CylDistribution klein_gordon_euclidean(const LatticeSpec& lat, int max_degree = kDefaultMaxDegree) {
    return CylDistribution::measure(lattice_space(lat), lattice_covariance(lat), max_degree);
}

inline std::vector<double> default_eps_schedule() { return {0.2, 0.1, 0.05, 0.025}; }

// Minkowskian lattice field: the oscillatory family with real form
// B = (-Delta_h + m^2)^-1 and the identity regularizer.
inline CylDistribution klein_gordon_minkowski(const LatticeSpec& lat,
                                              std::vector<double> eps_schedule = default_eps_schedule(),
                                              int extrapolation_order = 1,
                                              int max_degree = kDefaultMaxDegree) {
    const ModelSpace space = lattice_space(lat);
    BilinearForm b(space, lattice_covariance(lat).cast<cxd>());
    return CylDistribution::limit(ImaginaryGaussianSpec(std::move(b), std::move(eps_schedule),
                                                        extrapolation_order, Eigen::MatrixXd(),
                                                        max_degree));
}

// Plain real Gaussian measure on an arbitrary space, for callers that
// bring their own covariance.
inline CylDistribution real_gaussian_measure(const ModelSpace& space, const Eigen::MatrixXd& covariance,
                                             int max_degree = kDefaultMaxDegree) {
    return CylDistribution::measure(space, covariance, max_degree);
}

} // namespace cylfi
