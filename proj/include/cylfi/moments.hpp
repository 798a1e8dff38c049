#pragma once

// Moment functionals: the truncated dual of Pol(R^n), represented by
// symmetric moment tensors M_0..M_D. Evaluation against a polynomial with
// coefficient tensors T_k is
//
//     mu(P) = sum_k sum_{sorted alpha} mult(alpha) M_alpha T_alpha,
//
// the multiplicity restoring the sum over unordered index tuples.
// M_0 = 1 is the normalization mu(1) = 1.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/errors.hpp"
#include "cylfi/polytensor.hpp"

namespace cylfi {

// Default truncation degree for distributions and CLI commands; the
// CYLFI_MAX_DEGREE environment variable overrides it per process.
inline constexpr int kDefaultMaxDegree = 8;

// Dense intermediates in pushforward refuse to allocate past this many
// entries (n^k complex doubles =~ 1.6 GB at the cap).
inline constexpr std::int64_t kDenseTensorCap = 100000000;

class MomentFunctional {
  public:
    MomentFunctional(int nvars, int max_degree) : nvars_(nvars), max_degree_(max_degree) {
        if (nvars < 1) throw shape_error("MomentFunctional: nvars must be >= 1");
        if (max_degree < 0) throw shape_error("MomentFunctional: max_degree must be >= 0");
        tensors_.reserve(static_cast<std::size_t>(max_degree) + 1);
        for (int k = 0; k <= max_degree; ++k) tensors_.emplace_back(nvars, k);
        tensors_[0].set({}, cxd(1.0, 0.0)); // normalization
    }

    int nvars() const { return nvars_; }
    int max_degree() const { return max_degree_; }

    const SymTensor& tensor(int k) const {
        if (k < 0 || k > max_degree_)
            throw truncation_error("MomentFunctional: degree " + std::to_string(k) +
                                   " outside truncation 0.." + std::to_string(max_degree_));
        return tensors_[static_cast<std::size_t>(k)];
    }

    void set_tensor(SymTensor t) {
        if (t.nvars() != nvars_) throw shape_error("MomentFunctional: tensor variable count mismatch");
        if (t.rank() > max_degree_)
            throw truncation_error("MomentFunctional: tensor rank " + std::to_string(t.rank()) +
                                   " exceeds truncation " + std::to_string(max_degree_));
        tensors_[static_cast<std::size_t>(t.rank())] = std::move(t);
    }

    // Single moment M_{t_1..t_k}, tuple of 1-based variable indices.
    cxd moment(const IndexTuple& tuple) const { return tensor(static_cast<int>(tuple.size())).at(tuple); }

  private:
    int nvars_;
    int max_degree_;
    std::vector<SymTensor> tensors_;
};

// sum over sorted tuples alpha of mult(alpha) * M_alpha * T_alpha.
// Iterates the (usually sparser) polynomial-side tensor.
inline cxd tensor_pair(const SymTensor& m, const SymTensor& t) {
    if (m.nvars() != t.nvars() || m.rank() != t.rank())
        throw shape_error("tensor_pair: shape mismatch");
    cxd total(0.0, 0.0);
    for (const auto& [tuple, v] : t.entries())
        total += static_cast<double>(tuple_multiplicity(tuple)) * m.at(tuple) * v;
    return total;
}

inline cxd evaluate(const MomentFunctional& mu, const Polynomial& p) {
    if (p.nvars() != mu.nvars())
        throw shape_error("evaluate: polynomial has " + std::to_string(p.nvars()) +
                          " variables, functional has " + std::to_string(mu.nvars()));
    if (p.degree() > mu.max_degree())
        throw truncation_error("evaluate: polynomial degree " + std::to_string(p.degree()) +
                               " exceeds truncation " + std::to_string(mu.max_degree()));
    cxd total(0.0, 0.0);
    const auto tensors = fourier_poly(p);
    for (int k = 0; k < static_cast<int>(tensors.size()); ++k)
        total += tensor_pair(mu.tensor(k), tensors[static_cast<std::size_t>(k)]);
    return total;
}

namespace detail {

// Expand a symmetric tensor to a dense row-major array of size n^rank.
inline std::vector<cxd> dense_from_sym(const SymTensor& t) {
    const int n = t.nvars();
    const int k = t.rank();
    std::int64_t size = 1;
    for (int a = 0; a < k; ++a) {
        size *= n;
        if (size > kDenseTensorCap)
            throw resource_error("pushforward: dense intermediate exceeds entry cap");
    }
    std::vector<cxd> dense(static_cast<std::size_t>(size), cxd(0.0, 0.0));
    if (k == 0) {
        dense[0] = t.at({});
        return dense;
    }
    IndexTuple digits(static_cast<std::size_t>(k), 1);
    for (std::int64_t flat = 0; flat < size; ++flat) {
        dense[static_cast<std::size_t>(flat)] = t.at(digits);
        int a = k - 1;
        while (a >= 0) {
            if (digits[static_cast<std::size_t>(a)] < n) {
                ++digits[static_cast<std::size_t>(a)];
                break;
            }
            digits[static_cast<std::size_t>(a)] = 1;
            --a;
        }
    }
    return dense;
}

} // namespace detail

// Pushforward along lambda: R^n -> R^m, M'_k = lambda^(x k) M_k, i.e.
// lambda applied to every slot. Implemented as k dense mode products with
// axis cycling: each step contracts the leading axis and appends the new
// one, so k steps restore slot order. Deliberately independent of the
// polynomial route (compose_linear), which makes the duality
// mu'(P) = mu(P . lambda) a meaningful cross-check.
inline MomentFunctional pushforward(const LinearMap& lambda, const MomentFunctional& mu) {
    const int m = static_cast<int>(lambda.matrix.rows());
    const int n = static_cast<int>(lambda.matrix.cols());
    if (n != mu.nvars())
        throw shape_error("pushforward: map expects " + std::to_string(n) +
                          " inputs, functional has " + std::to_string(mu.nvars()));

    MomentFunctional out(m, mu.max_degree());
    const Eigen::MatrixXcd lam = lambda.matrix.cast<cxd>();

    for (int k = 0; k <= mu.max_degree(); ++k) {
        if (k == 0) {
            SymTensor t0(m, 0);
            t0.set({}, mu.tensor(0).at({}));
            out.set_tensor(std::move(t0));
            continue;
        }
        if (mu.tensor(k).is_zero()) continue;

        std::vector<cxd> buf = detail::dense_from_sym(mu.tensor(k));
        std::int64_t lead = n; // current leading-axis length
        std::int64_t rest = static_cast<std::int64_t>(buf.size()) / lead;
        for (int step = 0; step < k; ++step) {
            // in: [lead, rest] row-major; out: [rest, m]
            std::int64_t osize = rest * m;
            if (osize > kDenseTensorCap)
                throw resource_error("pushforward: dense intermediate exceeds entry cap");
            std::vector<cxd> next(static_cast<std::size_t>(osize), cxd(0.0, 0.0));
            Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                in(buf.data(), lead, rest);
            Eigen::Map<Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                ot(next.data(), rest, m);
            ot.noalias() = in.transpose() * lam.transpose();
            buf = std::move(next);
            // layout is now [axes step+2..k, new axes 1..step+1]; the next
            // leading axis still has length n until all originals are consumed
            lead = (step + 1 < k) ? n : m;
            rest = osize / lead;
        }

        SymTensor tk(m, k);
        for_each_sorted_tuple(m, k, [&](const IndexTuple& tuple) {
            std::int64_t flat = 0;
            for (int i : tuple) flat = flat * m + (i - 1);
            const cxd v = buf[static_cast<std::size_t>(flat)];
            if (v != cxd(0.0, 0.0)) tk.set(tuple, v);
        });
        out.set_tensor(std::move(tk));
    }
    return out;
}

// Largest entrywise difference between two same-shape tensors, over the
// union of their supports.
inline double max_abs_diff(const SymTensor& a, const SymTensor& b) {
    if (a.nvars() != b.nvars() || a.rank() != b.rank())
        throw shape_error("max_abs_diff: shape mismatch");
    double d = 0.0;
    for (const auto& [tuple, v] : a.entries()) d = std::max(d, std::abs(v - b.at(tuple)));
    for (const auto& [tuple, v] : b.entries()) d = std::max(d, std::abs(a.at(tuple) - v));
    return d;
}

inline double max_abs_diff(const MomentFunctional& a, const MomentFunctional& b) {
    if (a.nvars() != b.nvars() || a.max_degree() != b.max_degree())
        throw shape_error("max_abs_diff: functional shape mismatch");
    double d = 0.0;
    for (int k = 0; k <= a.max_degree(); ++k) d = std::max(d, max_abs_diff(a.tensor(k), b.tensor(k)));
    return d;
}

// Cauchy diagnostics for a family of functionals along a parameter
// schedule: per degree, the entrywise-max difference between consecutive
// members. Converged means the final difference clears tol at every degree.
struct ConvergenceReport {
    std::vector<std::vector<double>> deltas; // deltas[k][r] = |member r+1 - member r| at degree k
    std::vector<double> final_deltas;        // last column
    double tol = 0.0;
    bool converged = false;
};

inline ConvergenceReport check_convergence(const std::vector<MomentFunctional>& family, double tol) {
    if (family.size() < 3)
        throw insufficient_data_error("check_convergence: need at least 3 family members, got " +
                                      std::to_string(family.size()));
    const int n = family.front().nvars();
    const int d = family.front().max_degree();
    for (const auto& mu : family)
        if (mu.nvars() != n || mu.max_degree() != d)
            throw shape_error("check_convergence: family members have mixed shapes");

    ConvergenceReport rep;
    rep.tol = tol;
    rep.deltas.assign(static_cast<std::size_t>(d) + 1, {});
    rep.final_deltas.assign(static_cast<std::size_t>(d) + 1, 0.0);
    rep.converged = true;
    for (int k = 0; k <= d; ++k) {
        for (std::size_t r = 0; r + 1 < family.size(); ++r)
            rep.deltas[static_cast<std::size_t>(k)].push_back(
                max_abs_diff(family[r].tensor(k), family[r + 1].tensor(k)));
        rep.final_deltas[static_cast<std::size_t>(k)] = rep.deltas[static_cast<std::size_t>(k)].back();
        if (!(rep.final_deltas[static_cast<std::size_t>(k)] < tol)) rep.converged = false;
    }
    return rep;
}

} // namespace cylfi
