#pragma once

// sqrt(det M) on the domain of matrices whose Hermitian part is positive
// definite. On that domain the field of values, and with it the whole
// spectrum, lies in the open right half-plane, where the principal square
// root is continuous; the product of principal roots of the eigenvalues is
// therefore the unique continuous branch with sqrt(det I) = 1.

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "cylfi/errors.hpp"
#include "cylfi/model.hpp"

namespace cylfi {

inline cxd sqrt_det_branch(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw shape_error("sqrt_det_branch: matrix must be square");
    if (m.rows() == 0) throw shape_error("sqrt_det_branch: empty matrix");

    Eigen::MatrixXcd herm = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(herm, Eigen::EigenvaluesOnly);
    if (hs.eigenvalues().minCoeff() <= 0.0)
        throw domain_error("sqrt_det_branch: Hermitian part is not positive definite "
                           "(min eigenvalue " + std::to_string(hs.eigenvalues().minCoeff()) + ")");

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw numerical_error("sqrt_det_branch: eigenvalue computation failed");

    cxd prod(1.0, 0.0);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        prod *= std::sqrt(es.eigenvalues()(i)); // principal root, spectrum in Re > 0
    return prod;
}

} // namespace cylfi
