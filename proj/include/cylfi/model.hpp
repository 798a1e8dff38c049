#pragma once

// Finite-dimensional scaffolding: a model space R^N standing in for the
// test-function space, projections S' -> R^n given by n test functions,
// and complex symmetric bilinear forms B with Im B >= 0.
//
// A projection pi is stored as its matrix of rows: row j holds the
// coefficients of the test function f_j in the model basis, so
// (pi u)_j = <f_j, u>.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/errors.hpp"

namespace cylfi {

using cxd = std::complex<double>;

// Relative tolerance for the symmetry check B = B^T.
inline constexpr double kSymTol = 1e-12;
// Relative tolerance (against the largest |eigenvalue|) below which an
// eigenvalue of Im B counts as zero.
inline constexpr double kPsdTol = 1e-10;

struct ModelSpace {
    int dim;
    std::vector<std::string> basis_labels; // documentation only, exactly dim entries

    explicit ModelSpace(int n, std::vector<std::string> labels = {})
        : dim(n), basis_labels(std::move(labels)) {
        if (n < 1)
            throw shape_error("ModelSpace: dimension must be >= 1, got " + std::to_string(n));
        if (basis_labels.empty()) {
            basis_labels.reserve(static_cast<std::size_t>(n));
            for (int i = 1; i <= n; ++i) basis_labels.push_back("e" + std::to_string(i));
        }
        if (static_cast<int>(basis_labels.size()) != n)
            throw shape_error("ModelSpace: expected " + std::to_string(n) + " basis labels, got " +
                              std::to_string(basis_labels.size()));
    }
};

// Spaces are interchangeable iff they have the same dimension; labels are
// names, not identity.
inline bool same_space(const ModelSpace& a, const ModelSpace& b) { return a.dim == b.dim; }

struct TestFunction {
    ModelSpace space;
    Eigen::VectorXcd coeffs;

    TestFunction(ModelSpace s, Eigen::VectorXcd c) : space(std::move(s)), coeffs(std::move(c)) {
        if (coeffs.size() != space.dim)
            throw shape_error("TestFunction: coefficient vector has length " +
                              std::to_string(coeffs.size()) + ", space has dimension " +
                              std::to_string(space.dim));
    }

    bool is_real(double tol = 0.0) const {
        return coeffs.imag().cwiseAbs().maxCoeff() <= tol;
    }
};

struct Projection {
    ModelSpace space;
    Eigen::MatrixXd rows; // n x N, row j = test function f_j

    Projection(ModelSpace s, Eigen::MatrixXd r) : space(std::move(s)), rows(std::move(r)) {
        if (rows.rows() < 1)
            throw shape_error("Projection: needs at least one row");
        if (rows.cols() != space.dim)
            throw shape_error("Projection: rows have " + std::to_string(rows.cols()) +
                              " columns, space has dimension " + std::to_string(space.dim));
    }

    int arity() const { return static_cast<int>(rows.rows()); }

    TestFunction row(int j) const {
        if (j < 0 || j >= arity())
            throw shape_error("Projection: row index " + std::to_string(j) + " out of range");
        return TestFunction(space, rows.row(j).transpose().cast<cxd>());
    }
};

// Identity projection R^N -> R^N; projecting through it recovers the full
// family member on the whole model space.
inline Projection canonical_projection(const ModelSpace& space) {
    return Projection(space, Eigen::MatrixXd::Identity(space.dim, space.dim));
}

// Post-composition map lambda: R^n -> R^m acting on projection values.
struct LinearMap {
    Eigen::MatrixXd matrix; // m x n

    explicit LinearMap(Eigen::MatrixXd m) : matrix(std::move(m)) {
        if (matrix.rows() < 1 || matrix.cols() < 1)
            throw shape_error("LinearMap: matrix must be nonempty");
    }
};

// lambda . pi as a projection; defined whenever the shapes compose.
inline Projection compose(const LinearMap& lambda, const Projection& pi) {
    if (lambda.matrix.cols() != pi.arity())
        throw shape_error("compose: map expects " + std::to_string(lambda.matrix.cols()) +
                          " inputs, projection has arity " + std::to_string(pi.arity()));
    return Projection(pi.space, lambda.matrix * pi.rows);
}

// Pullback of a covector w in (R^n)' along pi: the test function w . pi,
// i.e. sum_j w_j f_j.
inline TestFunction apply_projection_dual(const Projection& pi, const Eigen::VectorXd& covector) {
    if (covector.size() != pi.arity())
        throw shape_error("apply_projection_dual: covector has length " +
                          std::to_string(covector.size()) + ", projection has arity " +
                          std::to_string(pi.arity()));
    return TestFunction(pi.space, (pi.rows.transpose() * covector).cast<cxd>());
}

// Complex symmetric bilinear form on the model space. Invariants checked
// at construction: B = B^T up to kSymTol * max|B_jk|, and Im B positive
// semidefinite up to kPsdTol * spectral scale. Eigenvalues of Im B are
// computed once and kept, so strict positivity queries are free.
class BilinearForm {
  public:
    BilinearForm(ModelSpace s, Eigen::MatrixXcd m) : space_(std::move(s)), matrix_(std::move(m)) {
        if (matrix_.rows() != matrix_.cols())
            throw shape_error("BilinearForm: matrix must be square");
        if (matrix_.rows() != space_.dim)
            throw shape_error("BilinearForm: matrix is " + std::to_string(matrix_.rows()) +
                              "x" + std::to_string(matrix_.cols()) + ", space has dimension " +
                              std::to_string(space_.dim));

        const double scale = matrix_.cwiseAbs().maxCoeff();
        const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
        if (asym > kSymTol * std::max(scale, 1.0))
            throw domain_error("BilinearForm: matrix is not symmetric (max asymmetry " +
                               std::to_string(asym) + ")");

        Eigen::MatrixXd im = matrix_.imag();
        im = ((im + im.transpose()) / 2.0).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double espread = ev.cwiseAbs().maxCoeff();
        if (ev.minCoeff() < -kPsdTol * std::max(espread, 1.0))
            throw domain_error("BilinearForm: imaginary part is not positive semidefinite "
                               "(min eigenvalue " + std::to_string(ev.minCoeff()) + ")");
        im_min_eig_ = ev.minCoeff();
        im_scale_ = espread;
    }

    const ModelSpace& space() const { return space_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    int dim() const { return space_.dim; }

    // Im B > 0: every eigenvalue clears the degeneracy tolerance.
    bool imag_strictly_positive() const { return im_min_eig_ > kPsdTol * std::max(im_scale_, 1.0); }

  private:
    ModelSpace space_;
    Eigen::MatrixXcd matrix_;
    double im_min_eig_ = 0.0;
    double im_scale_ = 0.0;
};

// Gram matrix of B on a list of test functions: G_jk = B(psi_j, psi_k).
// Bilinear, not sesquilinear: no conjugation on either slot. The result is
// symmetrized to kill roundoff asymmetry.
inline Eigen::MatrixXcd restrict_form(const BilinearForm& b, const std::vector<TestFunction>& funcs) {
    const int k = static_cast<int>(funcs.size());
    if (k == 0)
        throw shape_error("restrict_form: empty function list");
    Eigen::MatrixXcd v(b.dim(), k);
    for (int j = 0; j < k; ++j) {
        if (!same_space(funcs[static_cast<std::size_t>(j)].space, b.space()))
            throw shape_error("restrict_form: function " + std::to_string(j) +
                              " lives on a different space");
        v.col(j) = funcs[static_cast<std::size_t>(j)].coeffs;
    }
    Eigen::MatrixXcd g = v.transpose() * b.matrix() * v;
    return ((g + g.transpose()) / 2.0).eval();
}

} // namespace cylfi
