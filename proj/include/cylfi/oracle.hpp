#pragma once

// Independent quadrature oracle for low-dimensional moment integrals
//
//     I(P) = sqrt(det(i G^-1 / 2 pi)) * int_{R^k} P(s) e^{-(i/2) s.G^-1 s} ds,
//
// k <= 3, Im G > 0. The real part of the exponent is -(1/2) s.Q s with
// Q = -Im(G^-1), which is positive definite exactly when Im G is, so the
// integrand decays like a Gaussian with covariance Q^-1 and a tensor-grid
// trapezoid rule on a box of +-(sigmas / sqrt(lambda_min(Q))) converges
// superalgebraically (the integrand is entire and the tails are cut where
// they are negligible).
//
// This file must stay independent of the Wick machinery: it is the
// cross-check, not the implementation.
//
// Also hosts Richardson extrapolation of eps-indexed samples to eps = 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/errors.hpp"
#include "cylfi/polytensor.hpp"
#include "cylfi/sqrtdet.hpp"

namespace cylfi {

inline constexpr int kOracleMaxDim = 3;
// Boundary samples above this fraction of the peak mean the box clipped
// real mass.
inline constexpr double kBoundaryDecayTol = 1e-10;

struct QuadratureConfig {
    int points_per_axis = 2001;        // odd, so the grid contains the origin
    double box_halfwidth_sigmas = 12.0;

    void validate() const {
        if (points_per_axis < 3 || points_per_axis % 2 == 0)
            throw domain_error("QuadratureConfig: points_per_axis must be odd and >= 3, got " +
                               std::to_string(points_per_axis));
        if (!(box_halfwidth_sigmas > 0.0))
            throw domain_error("QuadratureConfig: box_halfwidth_sigmas must be positive");
    }
};

namespace detail {

struct OracleGrid {
    int k = 0;
    int npts = 0;
    double halfwidth = 0.0;
    double cell = 0.0;           // product of axis spacings
    Eigen::MatrixXcd a;          // G^-1
    cxd prefactor;
};

inline OracleGrid oracle_setup(const Eigen::MatrixXcd& gram, int nvars, const QuadratureConfig& cfg) {
    cfg.validate();
    if (gram.rows() != gram.cols()) throw shape_error("oracle: Gram matrix must be square");
    const int k = static_cast<int>(gram.rows());
    if (k < 1 || k > kOracleMaxDim)
        throw resource_error("oracle: dimension " + std::to_string(k) + " unsupported, grid rule covers 1.." +
                             std::to_string(kOracleMaxDim));
    if (nvars != k)
        throw shape_error("oracle: polynomial has " + std::to_string(nvars) +
                          " variables, Gram matrix is " + std::to_string(k) + "x" + std::to_string(k));

    Eigen::MatrixXd im = gram.imag();
    im = ((im + im.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ies(im, Eigen::EigenvaluesOnly);
    const double iscale = ies.eigenvalues().cwiseAbs().maxCoeff();
    if (ies.eigenvalues().minCoeff() <= kPsdTol * std::max(iscale, 1.0))
        throw domain_error("oracle: Im(Gram) must be strictly positive definite");

    OracleGrid g;
    g.k = k;
    g.npts = cfg.points_per_axis;
    g.a = gram.inverse();

    // decay form Q = -Im(G^-1); positive definite whenever Im G is
    Eigen::MatrixXd q = (-g.a.imag()).eval();
    q = ((q + q.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qes(q, Eigen::EigenvaluesOnly);
    const double qmin = qes.eigenvalues().minCoeff();
    if (qmin <= 0.0)
        throw numerical_error("oracle: decay form lost positive definiteness (min eigenvalue " +
                              std::to_string(qmin) + ")");
    g.halfwidth = cfg.box_halfwidth_sigmas / std::sqrt(qmin);
    const double h = 2.0 * g.halfwidth / static_cast<double>(g.npts - 1);
    g.cell = std::pow(h, k);

    const Eigen::MatrixXcd arg =
        (cxd(0.0, 1.0) * g.a / (2.0 * std::numbers::pi)).eval();
    g.prefactor = sqrt_det_branch(arg);
    return g;
}

// Compensated (Kahan) accumulator; summation order is the fixed odometer
// order, so results are bit-stable for a given configuration.
struct KahanSum {
    cxd sum{0.0, 0.0};
    cxd carry{0.0, 0.0};

    void add(cxd v) {
        const cxd y = v - carry;
        const cxd t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Walk the tensor grid once, handing each node's point, trapezoid weight,
// and boundary flag to the visitor.
template <typename Visitor>
inline void oracle_walk(const OracleGrid& g, Visitor&& visit) {
    std::vector<int> idx(static_cast<std::size_t>(g.k), 0);
    Eigen::VectorXd s(g.k);
    const double step = 2.0 * g.halfwidth / static_cast<double>(g.npts - 1);
    while (true) {
        double w = g.cell;
        bool boundary = false;
        for (int a = 0; a < g.k; ++a) {
            const int i = idx[static_cast<std::size_t>(a)];
            s(a) = -g.halfwidth + step * static_cast<double>(i);
            if (i == 0 || i == g.npts - 1) {
                w *= 0.5;
                boundary = true;
            }
        }
        visit(s, w, boundary);
        int a = g.k - 1;
        while (a >= 0 && idx[static_cast<std::size_t>(a)] == g.npts - 1) {
            idx[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) return;
        ++idx[static_cast<std::size_t>(a)];
    }
}

} // namespace detail

// Oracle value of mu(P) for the Gaussian with Gram matrix G, by brute
// quadrature. Throws numerical_error when the integrand has not decayed at
// the box boundary (relative to its peak) within kBoundaryDecayTol.
inline cxd integrate_moment(const Eigen::MatrixXcd& gram, const Polynomial& p,
                            const QuadratureConfig& cfg = {}) {
    const detail::OracleGrid g = detail::oracle_setup(gram, p.nvars(), cfg);

    detail::KahanSum acc;
    double peak = 0.0, edge = 0.0;
    detail::oracle_walk(g, [&](const Eigen::VectorXd& s, double w, bool boundary) {
        const Eigen::VectorXcd sc = s.cast<cxd>();
        const cxd expo = cxd(0.0, -0.5) * (sc.transpose() * (g.a * sc))(0);
        const cxd f = p.eval(sc) * std::exp(expo);
        const double mag = std::abs(f);
        peak = std::max(peak, mag);
        if (boundary) edge = std::max(edge, mag);
        acc.add(w * f);
    });

    if (edge > kBoundaryDecayTol * peak)
        throw numerical_error("oracle: integrand not decayed at box boundary (edge/peak " +
                              std::to_string(edge / peak) + "), widen the box");
    return g.prefactor * acc.sum;
}

// Same quadrature for a batch of monomials (1-based index tuples) in one
// grid pass: the exponential is evaluated once per node and shared, which
// is what makes sweeping whole moment tensors against the oracle feasible.
// Entry r agrees with integrate_moment(gram, monomial(tuples[r])).
inline std::vector<cxd> integrate_monomials(const Eigen::MatrixXcd& gram,
                                            const std::vector<IndexTuple>& tuples,
                                            const QuadratureConfig& cfg = {}) {
    const int k = static_cast<int>(gram.rows());
    const detail::OracleGrid g = detail::oracle_setup(gram, k, cfg);
    for (const auto& t : tuples)
        for (int i : t)
            if (i < 1 || i > k)
                throw shape_error("integrate_monomials: tuple index " + std::to_string(i) +
                                  " out of range 1.." + std::to_string(k));

    std::vector<detail::KahanSum> acc(tuples.size());
    double peak = 0.0, edge = 0.0;
    detail::oracle_walk(g, [&](const Eigen::VectorXd& s, double w, bool boundary) {
        const Eigen::VectorXcd sc = s.cast<cxd>();
        const cxd expo = cxd(0.0, -0.5) * (sc.transpose() * (g.a * sc))(0);
        const cxd e = std::exp(expo);
        const double mag = std::abs(e);
        peak = std::max(peak, mag);
        if (boundary) edge = std::max(edge, mag);
        for (std::size_t r = 0; r < tuples.size(); ++r) {
            double mono = 1.0;
            for (int i : tuples[r]) mono *= s(i - 1);
            acc[r].add((w * mono) * e);
        }
    });

    if (edge > kBoundaryDecayTol * peak)
        throw numerical_error("oracle: integrand not decayed at box boundary (edge/peak " +
                              std::to_string(edge / peak) + "), widen the box");
    std::vector<cxd> out(tuples.size());
    for (std::size_t r = 0; r < tuples.size(); ++r) out[r] = g.prefactor * acc[r].sum;
    return out;
}

struct EpsSample {
    double eps = 0.0;
    cxd value{0.0, 0.0};
};

struct Extrapolation {
    cxd value{0.0, 0.0};
    double residual = 0.0; // gap to the next-order extrapolant
};

// Polynomial (Neville) extrapolation of f(eps) to eps = 0 through the
// order+1 smallest samples; the residual is the distance to the extrapolant
// through the order+2 smallest, which is why one extra sample is required.
inline Extrapolation extrapolate_eps(std::vector<EpsSample> samples, int order) {
    if (order < 0) throw domain_error("extrapolate_eps: order must be >= 0");
    if (static_cast<int>(samples.size()) < order + 2)
        throw insufficient_data_error("extrapolate_eps: need at least " + std::to_string(order + 2) +
                                      " samples for order " + std::to_string(order) + ", got " +
                                      std::to_string(samples.size()));
    double emax = 0.0;
    for (const auto& s : samples) {
        if (!(s.eps > 0.0)) throw domain_error("extrapolate_eps: eps values must be positive");
        emax = std::max(emax, s.eps);
    }
    std::sort(samples.begin(), samples.end(),
              [](const EpsSample& a, const EpsSample& b) { return a.eps < b.eps; });
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        if (samples[i + 1].eps - samples[i].eps < 1e-14 * emax)
            throw numerical_error("extrapolate_eps: eps values too close, extrapolation ill-conditioned");

    // Neville tableau at x = 0 on the m smallest samples.
    auto neville = [&](int m) {
        std::vector<cxd> v(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = samples[static_cast<std::size_t>(i)].value;
        for (int lvl = 1; lvl < m; ++lvl)
            for (int i = 0; i + lvl < m; ++i) {
                const double xi = samples[static_cast<std::size_t>(i)].eps;
                const double xj = samples[static_cast<std::size_t>(i + lvl)].eps;
                v[static_cast<std::size_t>(i)] =
                    (xj * v[static_cast<std::size_t>(i)] - xi * v[static_cast<std::size_t>(i + 1)]) /
                    (xj - xi);
            }
        return v[0];
    };

    Extrapolation out;
    out.value = neville(order + 1);
    out.residual = std::abs(out.value - neville(order + 2));
    return out;
}

} // namespace cylfi
