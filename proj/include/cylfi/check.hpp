#pragma once

// Randomized self-check suites. Three independent laws are exercised on
// random instances:
//
//   compatibility   project(lambda . pi) == pushforward(lambda, project(pi))
//   functoriality   pushforward(lambda . kappa) == pushforward(lambda) . pushforward(kappa)
//   wick vs oracle  closed-form Gaussian moments == brute quadrature
//
// Every trial draws from a seeded generator, so failures replay exactly;
// the report carries the worst instance as JSON for that purpose. The
// sabotage flag deliberately corrupts one moment so callers can watch the
// gate actually close.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/distribution.hpp"
#include "cylfi/errors.hpp"
#include "cylfi/gaussian.hpp"
#include "cylfi/model.hpp"
#include "cylfi/moments.hpp"
#include "cylfi/oracle.hpp"
#include "cylfi/polytensor.hpp"
#include "cylfi/serialize.hpp"

namespace cylfi {

inline constexpr double kCompatTol = 1e-10;
inline constexpr double kFunctorTol = 1e-12;
// Wick vs oracle passes when |wick - oracle| <= rel * |oracle| + abs.
inline constexpr double kOracleRelTol = 1e-6;
inline constexpr double kOracleAbsTol = 1e-8;
// Grams per dimension in the oracle sweep; grid sizes per dimension are
// picked so the sweep stays at seconds, not minutes.
inline constexpr int kOracleGramsPerDim = 5;

struct CheckCaps {
    int max_space_dim = 6;
    int max_arity = 4;
    int max_map_rows = 4;
    int max_degree = 6;
};

struct SuiteReport {
    std::string name;
    int trials = 0;
    double tolerance = 0.0;
    double max_residual = 0.0;
    bool pass = false;
    int failing_trial = -1; // first failure, -1 if none
    json worst_instance;    // inputs of the worst (or first failing) trial
};

namespace detail {

// Per-trial generator: decorrelated from the master seed via splitmix64,
// so inserting a trial never perturbs the ones after it.
inline std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
    std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return std::mt19937_64(z);
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
    return m;
}

// Random form with Im B strictly positive: symmetric real part in
// [-1/2, 1/2], imaginary part I/2 + R R^T capped at spectral norm 3/2.
inline BilinearForm random_strict_form(std::mt19937_64& rng, int n) {
    Eigen::MatrixXd x = random_matrix(rng, n, n, 0.5);
    x = ((x + x.transpose()) / 2.0).eval();
    Eigen::MatrixXd r = random_matrix(rng, n, n, 0.5);
    Eigen::MatrixXd y = 0.5 * Eigen::MatrixXd::Identity(n, n) + r * r.transpose();
    const double ynorm = y.operatorNorm();
    if (ynorm > 1.5) y *= 1.5 / ynorm;
    return BilinearForm(ModelSpace(n), x.cast<cxd>() + cxd(0.0, 1.0) * y.cast<cxd>());
}

// Random projection; roughly a third of the draws are deliberately rank
// deficient (duplicated or combined rows) to keep the factor path honest.
inline Projection random_projection(std::mt19937_64& rng, int arity, int dim) {
    Eigen::MatrixXd rows = random_matrix(rng, arity, dim, 1.0);
    std::uniform_int_distribution<int> mode(0, 2);
    if (arity >= 2 && mode(rng) == 0) {
        std::uniform_int_distribution<int> pick(0, arity - 1);
        const int a = pick(rng);
        int b = pick(rng);
        if (a == b) b = (b + 1) % arity;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        rows.row(a) = u(rng) * rows.row(b);
    }
    return Projection(ModelSpace(dim), std::move(rows));
}

// Random moment functional with entries in [-1, 1]; M_0 stays 1.
inline MomentFunctional random_moments(std::mt19937_64& rng, int nvars, int max_degree) {
    MomentFunctional mu(nvars, max_degree);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 1; k <= max_degree; ++k) {
        SymTensor t(nvars, k);
        for_each_sorted_tuple(nvars, k, [&](const IndexTuple& tuple) {
            t.set(tuple, cxd(u(rng), u(rng)));
        });
        mu.set_tensor(std::move(t));
    }
    return mu;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

// project(lambda . pi) vs pushforward(lambda, project(pi)) on random
// Gaussian distributions. sabotage flips the sign of one moment on the
// direct route, which must trip the gate.
inline SuiteReport run_compatibility_suite(int trials, std::uint64_t seed, const CheckCaps& caps = {},
                                           bool sabotage = false) {
    SuiteReport rep;
    rep.name = "compatibility";
    rep.trials = trials;
    rep.tolerance = kCompatTol;
    if (trials < 1) throw domain_error("compatibility suite: trials must be >= 1");

    for (int trial = 0; trial < trials; ++trial) {
        auto rng = detail::trial_rng(seed, static_cast<std::uint64_t>(trial));
        std::uniform_int_distribution<int> dim_d(2, caps.max_space_dim);
        const int dim = dim_d(rng);
        std::uniform_int_distribution<int> arity_d(1, caps.max_arity);
        const int arity = arity_d(rng);
        std::uniform_int_distribution<int> out_d(1, caps.max_map_rows);
        const int out = out_d(rng);
        std::uniform_int_distribution<int> deg_d(3, caps.max_degree);
        const int degree = deg_d(rng);

        const BilinearForm b = detail::random_strict_form(rng, dim);
        const Projection pi = detail::random_projection(rng, arity, dim);
        const LinearMap lambda(detail::random_matrix(rng, out, arity, 1.0));
        const CylDistribution mu = CylDistribution::gaussian(b, degree);

        MomentFunctional direct = mu.project(compose(lambda, pi));
        const MomentFunctional routed = pushforward(lambda, mu.project(pi));

        if (sabotage && trial == 0) {
            // flip the first nonzero pair moment; the residual must explode
            for (const auto& [tuple, v] : direct.tensor(std::min(2, direct.max_degree())).entries()) {
                SymTensor t = direct.tensor(2);
                t.set(tuple, -v);
                direct.set_tensor(std::move(t));
                break;
            }
        }

        const double residual = max_abs_diff(direct, routed);
        if (residual > rep.max_residual || (residual > rep.tolerance && rep.failing_trial < 0)) {
            rep.worst_instance = json{{"suite", rep.name},
                                      {"trial", trial},
                                      {"seed", seed},
                                      {"residual", residual},
                                      {"form", form_to_json(b)},
                                      {"projection", projection_to_json(pi)},
                                      {"map", detail::matrix_to_json(lambda.matrix)},
                                      {"max_degree", degree}};
        }
        if (residual > rep.max_residual) rep.max_residual = residual;
        if (residual > rep.tolerance && rep.failing_trial < 0) rep.failing_trial = trial;
    }
    rep.pass = rep.failing_trial < 0;
    return rep;
}

// pushforward(lambda . kappa) vs the two-step route, on dense random
// moment data rather than Gaussians, so the tensor transport is tested
// away from any Wick structure.
inline SuiteReport run_functoriality_suite(int trials, std::uint64_t seed, const CheckCaps& caps = {}) {
    SuiteReport rep;
    rep.name = "functoriality";
    rep.trials = trials;
    rep.tolerance = kFunctorTol;
    if (trials < 1) throw domain_error("functoriality suite: trials must be >= 1");

    for (int trial = 0; trial < trials; ++trial) {
        auto rng = detail::trial_rng(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(trial));
        std::uniform_int_distribution<int> n_d(1, caps.max_arity);
        const int n = n_d(rng);
        std::uniform_int_distribution<int> mid_d(1, caps.max_map_rows);
        const int mid = mid_d(rng);
        std::uniform_int_distribution<int> out_d(1, caps.max_map_rows);
        const int out = out_d(rng);
        std::uniform_int_distribution<int> deg_d(2, caps.max_degree);
        const int degree = deg_d(rng);

        const MomentFunctional mu = detail::random_moments(rng, n, degree);
        const LinearMap kappa(detail::random_matrix(rng, mid, n, 1.0));
        const LinearMap lambda(detail::random_matrix(rng, out, mid, 1.0));
        const LinearMap composed(lambda.matrix * kappa.matrix);

        const MomentFunctional direct = pushforward(composed, mu);
        const MomentFunctional routed = pushforward(lambda, pushforward(kappa, mu));
        const double residual = max_abs_diff(direct, routed);

        if (residual > rep.max_residual || (residual > rep.tolerance && rep.failing_trial < 0)) {
            rep.worst_instance = json{{"suite", rep.name},
                                      {"trial", trial},
                                      {"seed", seed},
                                      {"residual", residual},
                                      {"moments", moments_to_json(mu)},
                                      {"inner_map", detail::matrix_to_json(kappa.matrix)},
                                      {"outer_map", detail::matrix_to_json(lambda.matrix)}};
        }
        if (residual > rep.max_residual) rep.max_residual = residual;
        if (residual > rep.tolerance && rep.failing_trial < 0) rep.failing_trial = trial;
    }
    rep.pass = rep.failing_trial < 0;
    return rep;
}

// Closed-form even moments vs the quadrature oracle on random Gram
// matrices, dimensions 1..3, all even moments through degree 6. Reported
// residual is |wick - oracle| normalized by the mixed tolerance, so pass
// means max_residual <= 1.
inline SuiteReport run_wick_oracle_suite(std::uint64_t seed, int grams_per_dim = kOracleGramsPerDim,
                                         int max_even_degree = 6) {
    SuiteReport rep;
    rep.name = "wick_vs_oracle";
    rep.tolerance = 1.0; // normalized units
    if (grams_per_dim < 1) throw domain_error("oracle suite: grams_per_dim must be >= 1");
    if (max_even_degree < 2 || max_even_degree % 2 != 0)
        throw domain_error("oracle suite: max_even_degree must be even and >= 2");

    int trial = 0;
    for (int k = 1; k <= kOracleMaxDim; ++k) {
        // finer grids are affordable in low dimension; 151^3 is already 3.4M nodes
        QuadratureConfig cfg;
        cfg.points_per_axis = (k == 1) ? 2001 : (k == 2 ? 501 : 151);

        for (int g = 0; g < grams_per_dim; ++g, ++trial) {
            auto rng = detail::trial_rng(seed ^ 0xa24baed4963ee407ULL, static_cast<std::uint64_t>(trial));
            const BilinearForm form = detail::random_strict_form(rng, k);
            const Eigen::MatrixXcd gram = form.matrix();

            std::vector<IndexTuple> tuples;
            for (int r = 2; r <= max_even_degree; r += 2)
                for_each_sorted_tuple(k, r, [&](const IndexTuple& t) { tuples.push_back(t); });

            const std::vector<cxd> oracle = integrate_monomials(gram, tuples, cfg);
            const MomentFunctional wick = detail::gram_moments(gram, max_even_degree);

            double worst = 0.0;
            IndexTuple worst_tuple;
            for (std::size_t r = 0; r < tuples.size(); ++r) {
                const cxd w = wick.moment(tuples[r]);
                const double allowed = kOracleRelTol * std::abs(oracle[r]) + kOracleAbsTol;
                const double q = std::abs(w - oracle[r]) / allowed;
                if (q > worst) {
                    worst = q;
                    worst_tuple = tuples[r];
                }
            }

            if (worst > rep.max_residual || (worst > rep.tolerance && rep.failing_trial < 0)) {
                rep.worst_instance = json{{"suite", rep.name},
                                          {"trial", trial},
                                          {"seed", seed},
                                          {"dimension", k},
                                          {"normalized_residual", worst},
                                          {"tuple", worst_tuple},
                                          {"form", form_to_json(form)},
                                          {"points_per_axis", cfg.points_per_axis}};
            }
            if (worst > rep.max_residual) rep.max_residual = worst;
            if (worst > rep.tolerance && rep.failing_trial < 0) rep.failing_trial = trial;
        }
    }
    rep.trials = trial;
    rep.pass = rep.failing_trial < 0;
    return rep;
}

} // namespace cylfi
