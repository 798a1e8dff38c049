#pragma once

// Polynomials on R^n and the symmetric tensors behind them.
//
// A polynomial P(s) = sum_alpha c_alpha s^alpha corresponds to the family
// of symmetric tensors T_0..T_D with
//
//     P(s) = sum_k <T_k, s x ... x s>   (k-fold),
//
// where the pairing expands over all index tuples. A symmetric rank-k
// tensor is stored sparsely on sorted index tuples; the entry at the
// sorted tuple of a monomial alpha is c_alpha / mult(alpha) with
// mult(alpha) = k! / prod_i alpha_i! the number of distinct orderings.
// No other normalization is baked in here; factors of i belong to the
// Green-function layer, not to the coefficient map.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/errors.hpp"
#include "cylfi/model.hpp"

namespace cylfi {

// Exponent vector of a monomial, length nvars.
using MultiIndex = std::vector<int>;
// Sorted 1-based variable indices, length = tensor rank.
using IndexTuple = std::vector<int>;

// Perfect-matching enumeration refuses to go past this order: the count
// grows as (k-1)!! and 12 keeps it at 10395 matchings.
inline constexpr int kWickOrderCap = 12;

// Sparse polynomial over C in nvars real variables. Terms live in a
// std::map keyed by exponent vector, so iteration order is deterministic.
class Polynomial {
  public:
    explicit Polynomial(int nvars) : nvars_(nvars) {
        if (nvars < 0) throw shape_error("Polynomial: nvars must be >= 0");
    }

    static Polynomial constant(int nvars, cxd c) {
        Polynomial p(nvars);
        p.add_term(MultiIndex(static_cast<std::size_t>(nvars), 0), c);
        return p;
    }

    // The coordinate polynomial s_i, 1-based.
    static Polynomial variable(int nvars, int i) {
        if (i < 1 || i > nvars)
            throw shape_error("Polynomial: variable index " + std::to_string(i) +
                              " out of range 1.." + std::to_string(nvars));
        Polynomial p(nvars);
        MultiIndex alpha(static_cast<std::size_t>(nvars), 0);
        alpha[static_cast<std::size_t>(i - 1)] = 1;
        p.add_term(alpha, cxd(1.0, 0.0));
        return p;
    }

    // Single monomial prod s_{t_a} from a tuple of 1-based indices.
    static Polynomial monomial(int nvars, const IndexTuple& tuple, cxd c = cxd(1.0, 0.0)) {
        Polynomial p(nvars);
        MultiIndex alpha(static_cast<std::size_t>(nvars), 0);
        for (int t : tuple) {
            if (t < 1 || t > nvars)
                throw shape_error("Polynomial: tuple index " + std::to_string(t) + " out of range");
            alpha[static_cast<std::size_t>(t - 1)] += 1;
        }
        p.add_term(alpha, c);
        return p;
    }

    int nvars() const { return nvars_; }

    void add_term(const MultiIndex& alpha, cxd c) {
        if (static_cast<int>(alpha.size()) != nvars_)
            throw shape_error("Polynomial: exponent vector has length " +
                              std::to_string(alpha.size()) + ", expected " + std::to_string(nvars_));
        for (int e : alpha)
            if (e < 0) throw domain_error("Polynomial: negative exponent");
        auto it = terms_.find(alpha);
        if (it == terms_.end()) {
            if (c != cxd(0.0, 0.0)) terms_.emplace(alpha, c);
        } else {
            it->second += c;
            if (it->second == cxd(0.0, 0.0)) terms_.erase(it);
        }
    }

    cxd coeff(const MultiIndex& alpha) const {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? cxd(0.0, 0.0) : it->second;
    }

    const std::map<MultiIndex, cxd>& terms() const { return terms_; }

    // Total degree; the zero polynomial has degree 0.
    int degree() const {
        int d = 0;
        for (const auto& [alpha, c] : terms_) {
            int t = 0;
            for (int e : alpha) t += e;
            d = std::max(d, t);
        }
        return d;
    }

    cxd eval(const Eigen::VectorXcd& s) const {
        if (s.size() != nvars_)
            throw shape_error("Polynomial::eval: point has wrong dimension");
        cxd total(0.0, 0.0);
        for (const auto& [alpha, c] : terms_) {
            cxd m = c;
            for (int i = 0; i < nvars_; ++i)
                for (int e = 0; e < alpha[static_cast<std::size_t>(i)]; ++e) m *= s(i);
            total += m;
        }
        return total;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.nvars_ != nvars_) throw shape_error("Polynomial: mixed variable counts");
        for (const auto& [alpha, c] : o.terms_) add_term(alpha, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        if (o.nvars_ != nvars_) throw shape_error("Polynomial: mixed variable counts");
        for (const auto& [alpha, c] : o.terms_) add_term(alpha, -c);
        return *this;
    }

    Polynomial& operator*=(cxd c) {
        if (c == cxd(0.0, 0.0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [alpha, v] : terms_) v *= c;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, cxd c) { return a *= c; }
    friend Polynomial operator*(cxd c, Polynomial a) { return a *= c; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.nvars_ != b.nvars_) throw shape_error("Polynomial: mixed variable counts");
        Polynomial out(a.nvars_);
        for (const auto& [aa, ca] : a.terms_)
            for (const auto& [ab, cb] : b.terms_) {
                MultiIndex alpha(aa);
                for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] += ab[i];
                out.add_term(alpha, ca * cb);
            }
        return out;
    }

  private:
    int nvars_;
    std::map<MultiIndex, cxd> terms_;
};

// Symmetric rank-k tensor on R^n, stored on sorted 1-based index tuples.
// Exact zeros are pruned; absent tuples read as zero.
class SymTensor {
  public:
    SymTensor(int nvars, int rank) : nvars_(nvars), rank_(rank) {
        if (nvars < 0 || rank < 0) throw shape_error("SymTensor: nvars and rank must be >= 0");
    }

    int nvars() const { return nvars_; }
    int rank() const { return rank_; }

    void set(IndexTuple idx, cxd v) {
        canonicalize(idx);
        if (v == cxd(0.0, 0.0))
            entries_.erase(idx);
        else
            entries_[idx] = v;
    }

    void add(IndexTuple idx, cxd v) {
        canonicalize(idx);
        auto it = entries_.find(idx);
        if (it == entries_.end()) {
            if (v != cxd(0.0, 0.0)) entries_.emplace(std::move(idx), v);
        } else {
            it->second += v;
            if (it->second == cxd(0.0, 0.0)) entries_.erase(it);
        }
    }

    cxd at(IndexTuple idx) const {
        canonicalize(idx);
        auto it = entries_.find(idx);
        return it == entries_.end() ? cxd(0.0, 0.0) : it->second;
    }

    const std::map<IndexTuple, cxd>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    SymTensor& operator*=(cxd c) {
        if (c == cxd(0.0, 0.0)) {
            entries_.clear();
            return *this;
        }
        for (auto& [idx, v] : entries_) v *= c;
        return *this;
    }

  private:
    void canonicalize(IndexTuple& idx) const {
        if (static_cast<int>(idx.size()) != rank_)
            throw shape_error("SymTensor: tuple has length " + std::to_string(idx.size()) +
                              ", rank is " + std::to_string(rank_));
        for (int i : idx)
            if (i < 1 || i > nvars_)
                throw shape_error("SymTensor: index " + std::to_string(i) + " out of range 1.." +
                                  std::to_string(nvars_));
        std::sort(idx.begin(), idx.end());
    }

    int nvars_;
    int rank_;
    std::map<IndexTuple, cxd> entries_;
};

// Number of distinct orderings of a sorted tuple: k! / prod(count of each
// repeated index)!. Fits int64 for k <= kWickOrderCap and beyond (20! is
// the first overflow).
inline std::int64_t tuple_multiplicity(const IndexTuple& sorted) {
    std::int64_t num = 1;
    for (std::size_t a = 1; a <= sorted.size(); ++a) num *= static_cast<std::int64_t>(a);
    std::int64_t den = 1;
    std::size_t run = 1;
    for (std::size_t a = 1; a <= sorted.size(); ++a) {
        if (a < sorted.size() && sorted[a] == sorted[a - 1]) {
            ++run;
            den *= static_cast<std::int64_t>(run);
        } else {
            run = 1;
        }
    }
    return num / den;
}

// Visit every sorted tuple 1 <= t_1 <= ... <= t_rank <= nvars in
// lexicographic order.
inline void for_each_sorted_tuple(int nvars, int rank, const std::function<void(const IndexTuple&)>& fn) {
    IndexTuple t(static_cast<std::size_t>(rank), 1);
    if (rank == 0) {
        fn(t);
        return;
    }
    if (nvars == 0) return;
    while (true) {
        fn(t);
        int a = rank - 1;
        while (a >= 0 && t[static_cast<std::size_t>(a)] == nvars) --a;
        if (a < 0) return;
        const int v = t[static_cast<std::size_t>(a)] + 1;
        for (int b = a; b < rank; ++b) t[static_cast<std::size_t>(b)] = v;
    }
}

// All perfect matchings of {1..k}, k even. Each matching is a list of k/2
// pairs (a, b) with a < b; the free point with the smallest label is always
// paired first, so the enumeration is lexicographic and stable.
struct PairingSet {
    int order = 0;
    std::vector<std::vector<std::pair<int, int>>> pairings;
};

inline PairingSet wick_pairings(int k, int cap = kWickOrderCap) {
    if (k % 2 != 0) throw domain_error("wick_pairings: order must be even, got " + std::to_string(k));
    if (k < 0) throw domain_error("wick_pairings: order must be >= 0");
    if (k > cap)
        throw resource_error("wick_pairings: order " + std::to_string(k) + " exceeds cap " +
                             std::to_string(cap));

    PairingSet out;
    out.order = k;
    std::vector<bool> used(static_cast<std::size_t>(k) + 1, false);
    std::vector<std::pair<int, int>> current;
    current.reserve(static_cast<std::size_t>(k / 2));

    std::function<void()> rec = [&]() {
        int first = 0;
        for (int a = 1; a <= k; ++a)
            if (!used[static_cast<std::size_t>(a)]) {
                first = a;
                break;
            }
        if (first == 0) {
            out.pairings.push_back(current);
            return;
        }
        used[static_cast<std::size_t>(first)] = true;
        for (int b = first + 1; b <= k; ++b) {
            if (used[static_cast<std::size_t>(b)]) continue;
            used[static_cast<std::size_t>(b)] = true;
            current.emplace_back(first, b);
            rec();
            current.pop_back();
            used[static_cast<std::size_t>(b)] = false;
        }
        used[static_cast<std::size_t>(first)] = false;
    };
    rec();
    return out;
}

// Coefficient map: polynomial -> tensors T_0..T_degree. Inverse below.
inline std::vector<SymTensor> fourier_poly(const Polynomial& p) {
    const int d = p.degree();
    std::vector<SymTensor> out;
    out.reserve(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) out.emplace_back(p.nvars(), k);

    for (const auto& [alpha, c] : p.terms()) {
        IndexTuple tuple;
        for (int i = 0; i < p.nvars(); ++i)
            for (int e = 0; e < alpha[static_cast<std::size_t>(i)]; ++e) tuple.push_back(i + 1);
        const int k = static_cast<int>(tuple.size());
        const auto mult = static_cast<double>(tuple_multiplicity(tuple));
        out[static_cast<std::size_t>(k)].add(tuple, c / mult);
    }
    return out;
}

// Tensors -> polynomial: c_alpha = mult(alpha) * T_alpha. Tensors of equal
// rank accumulate; variable counts must agree.
inline Polynomial poly_from_tensors(const std::vector<SymTensor>& tensors) {
    if (tensors.empty()) throw shape_error("poly_from_tensors: empty tensor list");
    const int n = tensors.front().nvars();
    Polynomial p(n);
    for (const auto& t : tensors) {
        if (t.nvars() != n) throw shape_error("poly_from_tensors: mixed variable counts");
        for (const auto& [tuple, v] : t.entries()) {
            MultiIndex alpha(static_cast<std::size_t>(n), 0);
            for (int i : tuple) alpha[static_cast<std::size_t>(i - 1)] += 1;
            p.add_term(alpha, v * static_cast<double>(tuple_multiplicity(tuple)));
        }
    }
    return p;
}

// Precomposition with a linear map: Q(s) = P(lambda s) for lambda m x n
// and P in m variables; Q lives in n variables. Row polynomials
// (lambda s)_i are expanded by repeated multiplication with power caching.
inline Polynomial compose_linear(const Polynomial& p, const LinearMap& lambda) {
    const int m = static_cast<int>(lambda.matrix.rows());
    const int n = static_cast<int>(lambda.matrix.cols());
    if (p.nvars() != m)
        throw shape_error("compose_linear: polynomial has " + std::to_string(p.nvars()) +
                          " variables, map has " + std::to_string(m) + " outputs");

    std::vector<Polynomial> rows;
    rows.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        Polynomial r(n);
        MultiIndex alpha(static_cast<std::size_t>(n), 0);
        for (int j = 0; j < n; ++j) {
            alpha[static_cast<std::size_t>(j)] = 1;
            r.add_term(alpha, cxd(lambda.matrix(i, j), 0.0));
            alpha[static_cast<std::size_t>(j)] = 0;
        }
        rows.push_back(std::move(r));
    }

    // powers[i][e] = ((lambda s)_i)^e, built on demand
    std::vector<std::vector<Polynomial>> powers(static_cast<std::size_t>(m),
                                                {Polynomial::constant(n, cxd(1.0, 0.0))});
    auto power = [&](int i, int e) -> const Polynomial& {
        auto& cache = powers[static_cast<std::size_t>(i)];
        while (static_cast<int>(cache.size()) <= e)
            cache.push_back(cache.back() * rows[static_cast<std::size_t>(i)]);
        return cache[static_cast<std::size_t>(e)];
    };

    Polynomial q(n);
    for (const auto& [alpha, c] : p.terms()) {
        Polynomial term = Polynomial::constant(n, c);
        for (int i = 0; i < m; ++i)
            if (alpha[static_cast<std::size_t>(i)] > 0)
                term = term * power(i, alpha[static_cast<std::size_t>(i)]);
        q += term;
    }
    return q;
}

// Full pairing <T, f_1 x ... x f_k>: each sorted entry contributes through
// all distinct orderings of its tuple, one slot per function.
inline cxd contract(const SymTensor& t, const std::vector<Eigen::VectorXcd>& funcs) {
    if (static_cast<int>(funcs.size()) != t.rank())
        throw shape_error("contract: got " + std::to_string(funcs.size()) + " functions, rank is " +
                          std::to_string(t.rank()));
    for (const auto& f : funcs)
        if (f.size() != t.nvars())
            throw shape_error("contract: function dimension mismatch");

    cxd total(0.0, 0.0);
    for (const auto& [tuple, v] : t.entries()) {
        IndexTuple perm = tuple; // sorted, so next_permutation walks all distinct orderings
        cxd sum(0.0, 0.0);
        do {
            cxd prod(1.0, 0.0);
            for (std::size_t a = 0; a < perm.size(); ++a) prod *= funcs[a](perm[a] - 1);
            sum += prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += v * sum;
    }
    return total;
}

// Symmetric power f x ... x f as a SymTensor; entry at a sorted tuple is
// the plain product of components.
inline SymTensor tensor_power(const Eigen::VectorXcd& f, int rank) {
    SymTensor t(static_cast<int>(f.size()), rank);
    for_each_sorted_tuple(static_cast<int>(f.size()), rank, [&](const IndexTuple& tuple) {
        cxd v(1.0, 0.0);
        for (int i : tuple) v *= f(i - 1);
        if (v != cxd(0.0, 0.0)) t.set(tuple, v);
    });
    return t;
}

} // namespace cylfi
