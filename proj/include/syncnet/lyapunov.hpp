#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "syncnet/dynamics.hpp"
#include "syncnet/linalg.hpp"
#include "syncnet/sampling.hpp"
#include "syncnet/tolerance.hpp"

namespace syncnet {

/// Quadratic Lyapunov candidate phi(x) = xᵀPx for symmetric positive definite P.
/// Carries the derived quadratic bounds c1 = lambda_min(P), c2 = lambda_max(P) and the
/// strong-convexity modulus m = 2 lambda_min(P).
class ConvexLyapunov {
public:
    explicit ConvexLyapunov(Matrix p) : p_(std::move(p)) {
        if (p_.rows() != p_.cols() || p_.rows() < 1)
            throw std::invalid_argument("ConvexLyapunov: P must be square");
        if (!is_symmetric(p_, 1e-12))
            throw std::invalid_argument("ConvexLyapunov: P must be symmetric within 1e-12");
        const auto eig = eigen_symmetric(p_);
        if (eig.values.front() <= 0.0)
            throw std::invalid_argument("ConvexLyapunov: P must be positive definite");
        c1_ = eig.values.front();
        c2_ = eig.values.back();
    }

    int dim() const { return p_.rows(); }
    const Matrix& p() const { return p_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double modulus() const { return 2.0 * c1_; }

    double value(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != p_.rows())
            throw std::invalid_argument("ConvexLyapunov::value: dimension mismatch");
        double s = 0.0;
        for (int i = 0; i < p_.rows(); ++i) {
            double row = 0.0;
            for (int j = 0; j < p_.cols(); ++j)
                row += p_(i, j) * x[j];
            s += x[i] * row;
        }
        return s;
    }

    void gradient(std::span<const double> x, std::span<double> out) const {
        if (static_cast<int>(x.size()) != p_.rows() || out.size() != x.size())
            throw std::invalid_argument("ConvexLyapunov::gradient: dimension mismatch");
        for (int i = 0; i < p_.rows(); ++i) {
            double row = 0.0;
            for (int j = 0; j < p_.cols(); ++j)
                row += p_(i, j) * x[j];
            out[i] = 2.0 * row;
        }
    }

    Vec gradient(std::span<const double> x) const {
        Vec g(x.size(), 0.0);
        gradient(x, g);
        return g;
    }

private:
    Matrix p_;
    double c1_ = 0.0;
    double c2_ = 0.0;
};

inline double phi_value(const ConvexLyapunov& phi, std::span<const double> x) {
    return phi.value(x);
}

inline Vec phi_gradient(const ConvexLyapunov& phi, std::span<const double> x) {
    return phi.gradient(x);
}

struct DissipationViolation {
    std::size_t sample_index;
    double inner_product;
    double bound;
};

/// Samples the gradient-dissipation condition <grad phi(eta), f(t, eta)> <= 0, or the
/// relative form <grad phi(eta - zeta), f(t, eta) - f(t, zeta)> <= 0. Returns every
/// sample where the inner product exceeds the tolerance band.
inline std::vector<DissipationViolation> check_dissipation(const ConvexLyapunov& phi,
                                                           const DynamicsSpec& spec,
                                                           std::span<const StateSample> samples,
                                                           bool relative, Tolerance tol = {}) {
    if (samples.empty())
        throw std::invalid_argument("check_dissipation: sampler must be non-empty");
    std::vector<DissipationViolation> violations;
    const int n = phi.dim();
    Vec grad(static_cast<std::size_t>(n)), field(static_cast<std::size_t>(n));
    Vec diff(static_cast<std::size_t>(n)), field_zeta(static_cast<std::size_t>(n));

    for (std::size_t k = 0; k < samples.size(); ++k) {
        const StateSample& s = samples[k];
        double inner = 0.0;
        double scale = 0.0;
        if (!relative) {
            phi.gradient(s.eta, grad);
            eval_vector_field(spec, s.t, s.eta, field);
            inner = dot(grad, field);
            scale = norm2(grad) * norm2(field);
        } else {
            if (static_cast<int>(s.zeta.size()) != n)
                throw std::invalid_argument("check_dissipation: relative mode needs zeta samples");
            for (int i = 0; i < n; ++i)
                diff[i] = s.eta[i] - s.zeta[i];
            phi.gradient(diff, grad);
            eval_vector_field(spec, s.t, s.eta, field);
            eval_vector_field(spec, s.t, s.zeta, field_zeta);
            for (int i = 0; i < n; ++i)
                field[i] -= field_zeta[i];
            inner = dot(grad, field);
            scale = norm2(grad) * norm2(field);
        }
        const double bound = tol.band(scale);
        if (inner > bound)
            violations.push_back({k, inner, bound});
    }
    return violations;
}

struct ConvexityViolation {
    std::size_t sample_index;
    double convexity_slack;        // phi(zeta) - phi(eta) - <grad phi(eta), zeta - eta>
    double strong_convexity_slack; // convexity_slack - (m/2) |eta - zeta|^2
    bool convexity_failed;
    bool strong_convexity_failed;
};

/// Samples the first-order convexity inequality and its strong form with the type's
/// modulus m; quadratic forms meet the strong bound with equality along the smallest
/// eigendirection of P.
inline std::vector<ConvexityViolation> check_convexity_properties(
    const ConvexLyapunov& phi, std::span<const PairSample> pairs, Tolerance tol = {}) {
    if (pairs.empty())
        throw std::invalid_argument("check_convexity_properties: sampler must be non-empty");
    std::vector<ConvexityViolation> violations;
    const int n = phi.dim();
    Vec grad(static_cast<std::size_t>(n)), step(static_cast<std::size_t>(n));

    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const PairSample& s = pairs[k];
        const double v_eta = phi.value(s.eta);
        const double v_zeta = phi.value(s.zeta);
        phi.gradient(s.eta, grad);
        for (int i = 0; i < n; ++i)
            step[i] = s.zeta[i] - s.eta[i];
        const double linear = dot(grad, step);
        const double quad = 0.5 * phi.modulus() * dot(step, step);

        const double convexity_slack = v_zeta - v_eta - linear;
        const double strong_slack = convexity_slack - quad;
        const double band = tol.band(std::fabs(v_eta) + std::fabs(v_zeta) + std::fabs(linear) + quad);

        const bool convexity_failed = convexity_slack < -band;
        const bool strong_failed = strong_slack < -band;
        if (convexity_failed || strong_failed)
            violations.push_back({k, convexity_slack, strong_slack, convexity_failed, strong_failed});
    }
    return violations;
}

}  // namespace syncnet
