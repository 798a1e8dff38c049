#pragma once

// A cylindrical distribution is the compatible family of its projections:
// the only operation that defines it here is project(pi) -> moment
// functional, and the compatibility law
//
//     project(lambda . pi) = pushforward(lambda, project(pi))
//
// is a checkable identity, not an assumption. Three kinds are supported:
// a complex Gaussian (Im B > 0), a classical real Gaussian measure with
// covariance C embedded as B = i C, and an oscillatory limit family.

#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cylfi/errors.hpp"
#include "cylfi/gaussian.hpp"
#include "cylfi/model.hpp"
#include "cylfi/moments.hpp"
#include "cylfi/polytensor.hpp"

namespace cylfi {

class CylDistribution {
  public:
    enum class Kind { gaussian, measure_backed, limit_family };

    static CylDistribution gaussian(BilinearForm b, int max_degree = kDefaultMaxDegree) {
        return CylDistribution(GaussianSpec(std::move(b), max_degree), Kind::gaussian);
    }

    // Classical real Gaussian measure with covariance C, embedded as the
    // complex Gaussian with B = i C. Moments then carry no phases at all,
    // which is what makes this kind a useful sanity anchor.
    static CylDistribution measure(const ModelSpace& space, const Eigen::MatrixXd& covariance,
                                   int max_degree = kDefaultMaxDegree) {
        Eigen::MatrixXd c = ((covariance + covariance.transpose()) / 2.0).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw domain_error("CylDistribution::measure: covariance must be symmetric positive definite");
        return CylDistribution(GaussianSpec(BilinearForm(space, cxd(0.0, 1.0) * c.cast<cxd>()),
                                            max_degree),
                               Kind::measure_backed);
    }

    static CylDistribution limit(ImaginaryGaussianSpec spec) {
        return CylDistribution(std::move(spec));
    }

    Kind kind() const { return kind_; }

    const ModelSpace& space() const {
        return kind_ == Kind::limit_family ? limit_->form_real.space() : gauss_->form.space();
    }

    int max_degree() const {
        return kind_ == Kind::limit_family ? limit_->max_degree : gauss_->max_degree;
    }

    const GaussianSpec& gaussian_spec() const {
        if (kind_ == Kind::limit_family)
            throw domain_error("CylDistribution: limit family has no single Gaussian spec");
        return *gauss_;
    }

    const ImaginaryGaussianSpec& limit_spec() const {
        if (kind_ != Kind::limit_family)
            throw domain_error("CylDistribution: not a limit family");
        return *limit_;
    }

    MomentFunctional project(const Projection& pi) const {
        if (kind_ == Kind::limit_family) return imaginary_project(*limit_, pi).moments;
        return gaussian_project(*gauss_, pi);
    }

    // Full projection with eps diagnostics; only limit families have one.
    ImaginaryProjection project_with_diagnostics(const Projection& pi) const {
        if (kind_ != Kind::limit_family)
            throw domain_error("CylDistribution: diagnostics exist only for limit families");
        return imaginary_project(*limit_, pi);
    }

  private:
    CylDistribution(GaussianSpec g, Kind k)
        : kind_(k), gauss_(std::make_shared<GaussianSpec>(std::move(g))) {}
    explicit CylDistribution(ImaginaryGaussianSpec l)
        : kind_(Kind::limit_family), limit_(std::make_shared<ImaginaryGaussianSpec>(std::move(l))) {}

    Kind kind_;
    std::shared_ptr<GaussianSpec> gauss_;        // gaussian, measure_backed
    std::shared_ptr<ImaginaryGaussianSpec> limit_; // limit_family
};

// Compatibility residual: entrywise-max distance between project(lambda.pi)
// and pushforward(lambda, project(pi)). Zero in exact arithmetic for every
// cylindrical distribution; the caller owns the tolerance.
inline double check_compatibility(const CylDistribution& mu, const Projection& pi,
                                  const LinearMap& lambda) {
    const MomentFunctional direct = mu.project(compose(lambda, pi));
    const MomentFunctional routed = pushforward(lambda, mu.project(pi));
    return max_abs_diff(direct, routed);
}

// k-point Green function on the full model space, i^k times the k-th
// moment tensor of the identity projection.
inline SymTensor green_function(const CylDistribution& mu, int k) {
    if (k < 0) throw shape_error("green_function: order must be >= 0");
    if (k > mu.max_degree())
        throw truncation_error("green_function: order " + std::to_string(k) + " exceeds truncation " +
                               std::to_string(mu.max_degree()));
    const MomentFunctional full = mu.project(canonical_projection(mu.space()));
    SymTensor g = full.tensor(k);
    g *= std::pow(cxd(0.0, 1.0), k);
    return g;
}

// Pairing of the k-point Green function against a rank-k contraction
// tensor g on the model space: sum over tuples with multiplicities.
inline cxd pair_green(const CylDistribution& mu, int k, const SymTensor& g) {
    if (g.nvars() != mu.space().dim)
        throw shape_error("pair_green: tensor variable count does not match the space");
    if (g.rank() != k) throw shape_error("pair_green: tensor rank does not match the order");
    return tensor_pair(green_function(mu, k), g);
}

} // namespace cylfi
