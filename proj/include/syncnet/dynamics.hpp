#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "syncnet/linalg.hpp"

namespace syncnet {

/// f(t, x) = 0.
struct ZeroDynamics {
    int dim = 1;
};

/// f(t, x) = A x.
struct LinearDynamics {
    Matrix a;
};

/// Planar block-diagonal skew-symmetric generator: blocks [[0, -w], [w, 0]] per rate,
/// with a trailing zero row when the dimension is odd. Neutrally stable by construction.
struct SkewRotationDynamics {
    int dim = 2;
    std::vector<double> rates;  // one per 2x2 block

    Matrix generator() const {
        Matrix s(dim, dim);
        for (std::size_t k = 0; k < rates.size(); ++k) {
            const int i = static_cast<int>(2 * k);
            s(i, i + 1) = -rates[k];
            s(i + 1, i) = rates[k];
        }
        return s;
    }
};

/// f(t, x) = sign * L_f * tanh(x) component-wise. tanh is smooth, odd, bounded by one
/// with derivative in (0, 1], so the global Lipschitz constant is exactly L_f.
/// contractive selects the inward orientation (sign -1), which satisfies the
/// gradient-dissipation condition for diagonal quadratic Lyapunov functions.
struct SaturatedDynamics {
    int dim = 1;
    double lipschitz = 1.0;
    bool contractive = false;
};

/// SaturatedDynamics plus a bounded time-periodic forcing term, identical for every
/// agent so it cancels in relative coordinates.
struct ForcedSaturatedDynamics {
    int dim = 1;
    double lipschitz = 1.0;
    bool contractive = false;
    Vec amplitude;   // per component
    double frequency = 1.0;
    Vec phase;       // per component
};

using DynamicsSpec = std::variant<ZeroDynamics, LinearDynamics, SkewRotationDynamics,
                                  SaturatedDynamics, ForcedSaturatedDynamics>;

inline int dimension(const DynamicsSpec& spec) {
    return std::visit(
        [](const auto& d) -> int {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, LinearDynamics>)
                return d.a.rows();
            else
                return d.dim;
        },
        spec);
}

namespace detail {

inline void check_spec(const DynamicsSpec& spec) {
    if (const auto* lin = std::get_if<LinearDynamics>(&spec)) {
        if (lin->a.rows() != lin->a.cols() || lin->a.rows() < 1)
            throw std::invalid_argument("LinearDynamics: A must be square and non-empty");
    } else if (const auto* rot = std::get_if<SkewRotationDynamics>(&spec)) {
        const int covered = static_cast<int>(2 * rot->rates.size());
        if (rot->dim < 1 || (covered != rot->dim && covered + 1 != rot->dim))
            throw std::invalid_argument("SkewRotationDynamics: rates do not match dimension");
    } else if (const auto* sat = std::get_if<SaturatedDynamics>(&spec)) {
        if (sat->dim < 1 || !(sat->lipschitz > 0.0))
            throw std::invalid_argument("SaturatedDynamics: needs dim >= 1 and L_f > 0");
    } else if (const auto* fs = std::get_if<ForcedSaturatedDynamics>(&spec)) {
        if (fs->dim < 1 || !(fs->lipschitz > 0.0))
            throw std::invalid_argument("ForcedSaturatedDynamics: needs dim >= 1 and L_f > 0");
        if (static_cast<int>(fs->amplitude.size()) != fs->dim ||
            static_cast<int>(fs->phase.size()) != fs->dim)
            throw std::invalid_argument("ForcedSaturatedDynamics: amplitude/phase dimension mismatch");
    } else if (const auto* z = std::get_if<ZeroDynamics>(&spec)) {
        if (z->dim < 1)
            throw std::invalid_argument("ZeroDynamics: dim must be >= 1");
    }
}

}  // namespace detail

/// Writes f(t, x) into out; out may alias nothing. Dimension mismatches throw.
inline void eval_vector_field(const DynamicsSpec& spec, double t, std::span<const double> x,
                              std::span<double> out) {
    const int n = dimension(spec);
    if (static_cast<int>(x.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("eval_vector_field: dimension mismatch");

    if (std::holds_alternative<ZeroDynamics>(spec)) {
        for (double& v : out)
            v = 0.0;
    } else if (const auto* lin = std::get_if<LinearDynamics>(&spec)) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += lin->a(i, j) * x[j];
            out[i] = s;
        }
    } else if (const auto* rot = std::get_if<SkewRotationDynamics>(&spec)) {
        for (std::size_t k = 0; k < rot->rates.size(); ++k) {
            const std::size_t i = 2 * k;
            out[i] = -rot->rates[k] * x[i + 1];
            out[i + 1] = rot->rates[k] * x[i];
        }
        if (n % 2 == 1)
            out[n - 1] = 0.0;
    } else if (const auto* sat = std::get_if<SaturatedDynamics>(&spec)) {
        const double gain = sat->contractive ? -sat->lipschitz : sat->lipschitz;
        for (int i = 0; i < n; ++i)
            out[i] = gain * std::tanh(x[i]);
    } else if (const auto* fs = std::get_if<ForcedSaturatedDynamics>(&spec)) {
        const double gain = fs->contractive ? -fs->lipschitz : fs->lipschitz;
        for (int i = 0; i < n; ++i)
            out[i] = gain * std::tanh(x[i]) + fs->amplitude[i] * std::sin(fs->frequency * t + fs->phase[i]);
    }
}

inline Vec eval_vector_field(const DynamicsSpec& spec, double t, std::span<const double> x) {
    Vec out(x.size(), 0.0);
    eval_vector_field(spec, t, x, out);
    return out;
}

/// Exact global Lipschitz constant per variant.
inline double lipschitz_constant(const DynamicsSpec& spec) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ZeroDynamics>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, LinearDynamics>) {
                return spectral_norm(d.a);
            } else if constexpr (std::is_same_v<T, SkewRotationDynamics>) {
                double top = 0.0;
                for (double w : d.rates)
                    top = std::max(top, std::fabs(w));
                return top;
            } else {
                return d.lipschitz;
            }
        },
        spec);
}

inline DynamicsSpec validated(DynamicsSpec spec) {
    detail::check_spec(spec);
    return spec;
}

/// True iff the largest eigenvalue of PA + AᵀP is at most tol, i.e. the quadratic form
/// xᵀPx is non-increasing along xdot = Ax.
inline bool check_neutral_stability(const Matrix& a, const Matrix& p, double tol = 1e-9) {
    if (a.rows() != a.cols() || p.rows() != p.cols() || a.rows() != p.rows())
        throw std::invalid_argument("check_neutral_stability: dimension mismatch");
    if (!is_symmetric(p, 1e-12))
        throw std::invalid_argument("check_neutral_stability: P must be symmetric");
    const Matrix m = p * a + a.transposed() * p;
    const auto eig = eigen_symmetric(m);
    return eig.values.back() <= tol;
}

}  // namespace syncnet
