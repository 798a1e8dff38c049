#pragma once

// The complex Gaussian family: for a form B with Im B > 0 the density
// against a projection pi with factored basis psi_1..psi_k is
//
//     sqrt(det(i G^-1 / 2 pi)) e^{-(i/2) s . G^-1 s},   G_jk = B(psi_j, psi_k),
//
// normalized so the total mass is 1. Moments close in terms of the pair
// value C = -i G: odd moments vanish and
//
//     M_{j_1..j_2m} = sum over perfect matchings  prod_pairs C_{j_a j_b},
//
// so no quadrature is needed anywhere in this file; the oracle only enters
// through tests. Degenerate projections factor through pi = rho . pi' with
// pi' of full rank, and moments push forward along rho.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/errors.hpp"
#include "cylfi/model.hpp"
#include "cylfi/moments.hpp"
#include "cylfi/oracle.hpp"
#include "cylfi/polytensor.hpp"

namespace cylfi {

// Singular values below this fraction of the largest count as rank loss.
inline constexpr double kRankTol = 1e-10;
// Residual tolerance for the factorization identity pi = rho . pi',
// relative to the largest row norm of pi.
inline constexpr double kFactorTol = 1e-10;
// A real symmetric Gram matrix whose smallest |eigenvalue| is below this
// fraction of the largest is singular on the projected subspace; the
// oscillatory limit does not settle there.
inline constexpr double kSingularLimitTol = 1e-10;

struct GaussianSpec {
    BilinearForm form;
    int max_degree;

    explicit GaussianSpec(BilinearForm b, int degree = kDefaultMaxDegree)
        : form(std::move(b)), max_degree(degree) {
        if (degree < 0) throw shape_error("GaussianSpec: max_degree must be >= 0");
        if (degree > kWickOrderCap)
            throw resource_error("GaussianSpec: max_degree " + std::to_string(degree) +
                                 " exceeds the Wick order cap " + std::to_string(kWickOrderCap));
        if (!form.imag_strictly_positive())
            throw domain_error("GaussianSpec: Im B must be strictly positive definite");
    }
};

// pi = rho . pi' with pi' of full rank k: rho is n x k, and the rows of
// pi' are returned as test functions. rank == 0 happens only for the zero
// projection.
struct FactoredProjection {
    Eigen::MatrixXd rho;
    std::vector<TestFunction> basis;
    int rank = 0;
};

// Factor through the SVD pi = U S V^T: keep the k columns with singular
// value above kRankTol * s_max, set rho = U_k S_k and take the rows of
// V_k^T (orthonormal) as the reduced projection. The identity
// pi = rho . pi' is re-checked numerically before returning.
inline FactoredProjection factor_projection(const Projection& pi) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pi.rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;

    FactoredProjection out;
    int k = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > kRankTol * smax) ++k;
    out.rank = k;
    if (k == 0) {
        out.rho = Eigen::MatrixXd::Zero(pi.arity(), 0);
        return out;
    }

    out.rho = svd.matrixU().leftCols(k) * sv.head(k).asDiagonal();
    const Eigen::MatrixXd reduced = svd.matrixV().leftCols(k).transpose();
    for (int j = 0; j < k; ++j)
        out.basis.emplace_back(pi.space, reduced.row(j).transpose().cast<cxd>());

    const double rownorm = pi.rows.rowwise().norm().maxCoeff();
    const double resid = (pi.rows - out.rho * reduced).cwiseAbs().maxCoeff();
    if (resid > kFactorTol * std::max(rownorm, 1.0))
        throw numerical_error("factor_projection: factorization residual " + std::to_string(resid) +
                              " exceeds tolerance");
    return out;
}

namespace detail {

// Rank-r moment tensor on k variables from the pair value matrix C:
// entry at a sorted tuple is the sum over perfect matchings of products of
// C at the paired positions. Odd r gives the zero tensor.
inline SymTensor wick_moment_tensor(const Eigen::MatrixXcd& pair_value, int r, int cap = kWickOrderCap) {
    const int k = static_cast<int>(pair_value.rows());
    SymTensor t(k, r);
    if (r % 2 != 0) return t;
    const PairingSet ps = wick_pairings(r, cap);
    for_each_sorted_tuple(k, r, [&](const IndexTuple& tuple) {
        cxd total(0.0, 0.0);
        for (const auto& matching : ps.pairings) {
            cxd prod(1.0, 0.0);
            for (const auto& [a, b] : matching)
                prod *= pair_value(tuple[static_cast<std::size_t>(a - 1)] - 1,
                                   tuple[static_cast<std::size_t>(b - 1)] - 1);
            total += prod;
        }
        if (total != cxd(0.0, 0.0)) t.set(tuple, total);
    });
    return t;
}

// Moments of the nondegenerate Gaussian with Gram matrix G on its own k
// variables: M_0 = 1, even tensors by Wick with C = -i G.
inline MomentFunctional gram_moments(const Eigen::MatrixXcd& gram, int max_degree) {
    const Eigen::MatrixXcd pair_value = cxd(0.0, -1.0) * gram;
    MomentFunctional mu(static_cast<int>(gram.rows()), max_degree);
    for (int r = 2; r <= max_degree; r += 2) mu.set_tensor(wick_moment_tensor(pair_value, r));
    return mu;
}

// Shared validation: Gram matrix of the factored basis, with a strict
// positivity re-check (restriction can lose definiteness only through
// roundoff, but the failure mode is loud).
inline Eigen::MatrixXcd checked_gram(const BilinearForm& form, const std::vector<TestFunction>& basis) {
    Eigen::MatrixXcd gram = restrict_form(form, basis);
    Eigen::MatrixXd im = gram.imag();
    im = ((im + im.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw numerical_error("gaussian: restricted Gram matrix lost strict positivity of Im");
    return gram;
}

} // namespace detail

// Moment functional of the Gaussian under a projection, degenerate or not.
inline MomentFunctional gaussian_project(const GaussianSpec& spec, const Projection& pi) {
    if (!same_space(pi.space, spec.form.space()))
        throw shape_error("gaussian_project: projection and form live on different spaces");
    const FactoredProjection f = factor_projection(pi);
    if (f.rank == 0) return MomentFunctional(pi.arity(), spec.max_degree); // point mass at 0

    const Eigen::MatrixXcd gram = detail::checked_gram(spec.form, f.basis);
    const MomentFunctional reduced = detail::gram_moments(gram, spec.max_degree);
    if (f.rank == pi.arity() && (f.rho - Eigen::MatrixXd::Identity(f.rank, f.rank)).cwiseAbs().maxCoeff() == 0.0)
        return reduced;
    return pushforward(LinearMap(f.rho), reduced);
}

// Total mass of the Gaussian density with Gram matrix G, computed by
// honest quadrature (the P = 1 moment integral). Equals 1 whenever the
// normalization prefactor is on the same branch as the analytic value,
// which is exactly what this function exists to check.
inline cxd partition_function(const Eigen::MatrixXcd& gram, const QuadratureConfig& cfg = {}) {
    return integrate_moment(gram, Polynomial::constant(static_cast<int>(gram.rows()), cxd(1.0, 0.0)), cfg);
}

// k-point Green function of the Gaussian on the full model space:
// G_k = i^k M_k where M_k is the k-th moment tensor under the identity
// projection. The i-powers live here, not in the moment layer.
inline SymTensor green_function(const GaussianSpec& spec, int k) {
    if (k < 0) throw shape_error("green_function: order must be >= 0");
    if (k > spec.max_degree)
        throw truncation_error("green_function: order " + std::to_string(k) + " exceeds truncation " +
                               std::to_string(spec.max_degree));
    const MomentFunctional mu = gaussian_project(spec, canonical_projection(spec.form.space()));
    SymTensor g = mu.tensor(k);
    const cxd ik = std::pow(cxd(0.0, 1.0), k);
    g *= ik;
    return g;
}

struct GeneratingFunctional {
    cxd value{0.0, 0.0};
    std::vector<cxd> terms; // terms[k] = i^k/k! <M_k, phi^(x k)>
};

// Truncated generating functional Z[phi] = sum_k (i^k / k!) <M_k, phi^k>
// for a real test function phi. For Im B > 0 the exact series sums to
// exp((i/2) B(phi, phi)); the truncation error is the caller's to judge
// from the term sizes.
inline GeneratingFunctional generating_functional(const GaussianSpec& spec, const TestFunction& phi,
                                                  int degree) {
    if (!same_space(phi.space, spec.form.space()))
        throw shape_error("generating_functional: test function lives on a different space");
    if (!phi.is_real(0.0))
        throw domain_error("generating_functional: test function must be real");
    if (degree < 0) throw shape_error("generating_functional: degree must be >= 0");
    if (degree > spec.max_degree)
        throw truncation_error("generating_functional: degree " + std::to_string(degree) +
                               " exceeds truncation " + std::to_string(spec.max_degree));

    const MomentFunctional mu = gaussian_project(spec, canonical_projection(spec.form.space()));
    GeneratingFunctional out;
    out.terms.reserve(static_cast<std::size_t>(degree) + 1);
    double factorial = 1.0;
    for (int k = 0; k <= degree; ++k) {
        if (k > 0) factorial *= static_cast<double>(k);
        const std::vector<Eigen::VectorXcd> copies(static_cast<std::size_t>(k), phi.coeffs);
        const cxd pairing = contract(mu.tensor(k), copies);
        const cxd term = std::pow(cxd(0.0, 1.0), k) / factorial * pairing;
        out.terms.push_back(term);
        out.value += term;
    }
    return out;
}

// Oscillatory (pure imaginary) Gaussian: B_real is real symmetric, and the
// family B_eps = B_real + i eps E with E symmetric positive definite
// (identity unless stated) has honest Gaussians for every eps > 0. Moments
// per projection are Richardson-extrapolated to eps = 0 along the schedule.
struct ImaginaryGaussianSpec {
    BilinearForm form_real;
    std::vector<double> eps_schedule; // strictly decreasing, positive
    int extrapolation_order = 1;
    Eigen::MatrixXd epsilon_form;     // E
    int max_degree = kDefaultMaxDegree;
    double convergence_tol = -1.0;    // < 0: report diagnostics, never fail on them

    ImaginaryGaussianSpec(BilinearForm b, std::vector<double> schedule, int order = 1,
                          Eigen::MatrixXd eps_form = Eigen::MatrixXd(), int degree = kDefaultMaxDegree)
        : form_real(std::move(b)), eps_schedule(std::move(schedule)), extrapolation_order(order),
          epsilon_form(std::move(eps_form)), max_degree(degree) {
        if (form_real.matrix().imag().cwiseAbs().maxCoeff() != 0.0)
            throw domain_error("ImaginaryGaussianSpec: the base form must be real");
        if (eps_schedule.empty())
            throw insufficient_data_error("ImaginaryGaussianSpec: empty eps schedule");
        for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
            if (!(eps_schedule[i] > 0.0))
                throw domain_error("ImaginaryGaussianSpec: eps values must be positive");
            if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
                throw domain_error("ImaginaryGaussianSpec: eps schedule must be strictly decreasing");
        }
        if (order < 0) throw domain_error("ImaginaryGaussianSpec: extrapolation order must be >= 0");
        if (degree < 0 || degree > kWickOrderCap)
            throw resource_error("ImaginaryGaussianSpec: max_degree out of range");
        if (epsilon_form.size() == 0)
            epsilon_form = Eigen::MatrixXd::Identity(form_real.dim(), form_real.dim());
        if (epsilon_form.rows() != form_real.dim() || epsilon_form.cols() != form_real.dim())
            throw shape_error("ImaginaryGaussianSpec: epsilon form has wrong shape");
        Eigen::MatrixXd e = ((epsilon_form + epsilon_form.transpose()) / 2.0).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw domain_error("ImaginaryGaussianSpec: epsilon form must be symmetric positive definite");
    }
};

struct ImaginaryProjection {
    MomentFunctional moments;              // extrapolated to eps = 0
    std::vector<double> eps;               // the schedule actually used
    std::vector<MomentFunctional> family;  // per-eps projected moments
    ConvergenceReport diagnostics;         // Cauchy deltas along the schedule
};

namespace detail {

inline std::string format_deltas(const ConvergenceReport& rep) {
    std::string s;
    for (std::size_t k = 0; k < rep.deltas.size(); ++k) {
        if (rep.deltas[k].empty()) continue;
        s += "degree " + std::to_string(k) + ":";
        for (double d : rep.deltas[k]) s += " " + std::to_string(d);
        s += "\n";
    }
    return s;
}

} // namespace detail

// Project the oscillatory Gaussian: factor pi once, run the eps family on
// the shared reduced Gram matrices, push each member forward, then
// extrapolate entrywise. Errors are loud: a singular restricted form or
// growing Cauchy deltas raise convergence_error with the delta table.
inline ImaginaryProjection imaginary_project(const ImaginaryGaussianSpec& spec, const Projection& pi) {
    if (!same_space(pi.space, spec.form_real.space()))
        throw shape_error("imaginary_project: projection and form live on different spaces");

    const FactoredProjection f = factor_projection(pi);
    ImaginaryProjection out{MomentFunctional(pi.arity(), spec.max_degree), spec.eps_schedule, {}, {}};
    if (f.rank == 0) {
        out.diagnostics.converged = true;
        return out;
    }

    // real reduced Gram and reduced regularizer
    Eigen::MatrixXcd gram_c = restrict_form(spec.form_real, f.basis);
    const Eigen::MatrixXd gram_r = gram_c.real();
    Eigen::MatrixXd basis_rows(f.rank, spec.form_real.dim());
    for (int j = 0; j < f.rank; ++j) basis_rows.row(j) = f.basis[static_cast<std::size_t>(j)].coeffs.real();
    Eigen::MatrixXd ered = basis_rows * spec.epsilon_form * basis_rows.transpose();
    ered = ((ered + ered.transpose()) / 2.0).eval();

    // the limit exists only where the real form is nondegenerate
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(((gram_r + gram_r.transpose()) / 2.0).eval(),
                                                       Eigen::EigenvaluesOnly);
    const double gmax = ges.eigenvalues().cwiseAbs().maxCoeff();
    const double gmin = ges.eigenvalues().cwiseAbs().minCoeff();
    if (gmax == 0.0 || gmin <= kSingularLimitTol * gmax)
        throw convergence_error(
            "imaginary_project: the real form is singular on the projected subspace, "
            "the oscillatory limit does not converge there (min |eigenvalue| " +
                std::to_string(gmin) + ", max " + std::to_string(gmax) + ")",
            "restricted real Gram matrix is singular");

    for (double eps : spec.eps_schedule) {
        const Eigen::MatrixXcd gram_eps = gram_r.cast<cxd>() + cxd(0.0, 1.0) * eps * ered.cast<cxd>();
        MomentFunctional reduced = detail::gram_moments(gram_eps, spec.max_degree);
        out.family.push_back(f.rank == pi.arity() && f.rho.isIdentity(0.0)
                                 ? std::move(reduced)
                                 : pushforward(LinearMap(f.rho), reduced));
    }

    if (out.family.size() == 1) { // passthrough: a single eps is its own answer
        out.moments = out.family.front();
        out.diagnostics.converged = true;
        return out;
    }
    if (static_cast<int>(out.family.size()) < spec.extrapolation_order + 2)
        throw insufficient_data_error("imaginary_project: schedule of length " +
                                      std::to_string(out.family.size()) + " cannot support order " +
                                      std::to_string(spec.extrapolation_order) + " extrapolation");

    if (out.family.size() >= 3) {
        const double tol = spec.convergence_tol < 0.0 ? std::numeric_limits<double>::infinity()
                                                      : spec.convergence_tol;
        out.diagnostics = check_convergence(out.family, tol);
        for (const auto& dk : out.diagnostics.deltas) {
            for (std::size_t r = 1; r < dk.size(); ++r)
                if (dk[r] > dk[r - 1] * (1.0 + 1e-9) + 1e-15 && dk[r] > 1e-12)
                    throw convergence_error("imaginary_project: Cauchy deltas grow along the schedule, "
                                            "the eps family diverges",
                                            detail::format_deltas(out.diagnostics));
        }
        if (!out.diagnostics.converged)
            throw convergence_error("imaginary_project: final Cauchy delta misses tolerance " +
                                        std::to_string(tol),
                                    detail::format_deltas(out.diagnostics));
    } else {
        out.diagnostics.converged = true; // two members: extrapolation only, no Cauchy verdict
    }

    // entrywise Richardson over the union of supports, degree by degree
    for (int k = 0; k <= spec.max_degree; ++k) {
        SymTensor tk(pi.arity(), k);
        std::vector<IndexTuple> support;
        for (const auto& mu : out.family)
            for (const auto& [tuple, v] : mu.tensor(k).entries()) {
                (void)v;
                support.push_back(tuple);
            }
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        for (const auto& tuple : support) {
            std::vector<EpsSample> samples;
            samples.reserve(out.family.size());
            for (std::size_t r = 0; r < out.family.size(); ++r)
                samples.push_back({spec.eps_schedule[r], out.family[r].tensor(k).at(tuple)});
            const Extrapolation ex = extrapolate_eps(std::move(samples), spec.extrapolation_order);
            if (ex.value != cxd(0.0, 0.0)) tk.set(tuple, ex.value);
        }
        out.moments.set_tensor(std::move(tk));
    }
    return out;
}

} // namespace cylfi
