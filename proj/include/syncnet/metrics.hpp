#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "syncnet/linalg.hpp"
#include "syncnet/lyapunov.hpp"
#include "syncnet/simulate.hpp"

namespace syncnet {

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
};

/// Max over unordered agent pairs of the squared state distance; 0 for a single agent.
inline double disagreement(std::span<const double> x, int num_agents, int dim) {
    if (num_agents < 1 || static_cast<int>(x.size()) != num_agents * dim)
        throw std::invalid_argument("disagreement: bad state layout");
    double worst = 0.0;
    for (int i = 0; i < num_agents; ++i)
        for (int j = i + 1; j < num_agents; ++j) {
            const double d = squared_distance(
                x.subspan(static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)),
                x.subspan(static_cast<std::size_t>(j) * dim, static_cast<std::size_t>(dim)));
            worst = std::max(worst, d);
        }
    return worst;
}

/// Max over agents of the squared distance to the leader state.
inline double leader_error(std::span<const double> x, std::span<const double> y, int num_agents,
                           int dim) {
    if (num_agents < 1 || static_cast<int>(x.size()) != num_agents * dim ||
        static_cast<int>(y.size()) != dim)
        throw std::invalid_argument("leader_error: bad state layout");
    double worst = 0.0;
    for (int i = 0; i < num_agents; ++i)
        worst = std::max(worst, squared_distance(
                                    x.subspan(static_cast<std::size_t>(i) * dim,
                                              static_cast<std::size_t>(dim)),
                                    y));
    return worst;
}

/// Discounted pairwise maximum (1/2) e^{-2L(t - t0)} max_{i,j} |x_i - x_j|^2, the
/// quantity that stays non-increasing under globally Lipschitz dynamics.
inline double lipschitz_v(double t, double t0, double lipschitz, std::span<const double> x,
                          int num_agents, int dim) {
    if (t < t0)
        throw std::invalid_argument("lipschitz_v: t must be >= t0");
    if (lipschitz < 0.0)
        throw std::invalid_argument("lipschitz_v: L must be nonnegative");
    return 0.5 * std::exp(-2.0 * lipschitz * (t - t0)) * disagreement(x, num_agents, dim);
}

inline TimeSeries disagreement_series(const Trajectory& traj) {
    TimeSeries s;
    s.times = traj.times();
    s.values.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        s.values.push_back(disagreement(traj.states(k), traj.num_agents(), traj.dim()));
    return s;
}

inline TimeSeries leader_error_series(const Trajectory& traj) {
    if (!traj.has_leader())
        throw std::invalid_argument("leader_error_series: trajectory has no leader");
    TimeSeries s;
    s.times = traj.times();
    s.values.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        s.values.push_back(
            leader_error(traj.states(k), traj.leader_state(k), traj.num_agents(), traj.dim()));
    return s;
}

inline TimeSeries lipschitz_v_series(const Trajectory& traj, double lipschitz) {
    TimeSeries s;
    s.times = traj.times();
    s.values.reserve(traj.size());
    const double t0 = traj.size() ? traj.time(0) : 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        s.values.push_back(
            lipschitz_v(traj.time(k), t0, lipschitz, traj.states(k), traj.num_agents(), traj.dim()));
    return s;
}

/// max_i phi(x_i(t)) per sample; leaderless trajectories only.
inline TimeSeries max_phi_series(const Trajectory& traj, const ConvexLyapunov& phi) {
    if (traj.has_leader())
        throw std::invalid_argument("max_phi_series: use max_relative_phi_series for leader runs");
    if (phi.dim() != traj.dim())
        throw std::invalid_argument("max_phi_series: dimension mismatch");
    TimeSeries s;
    s.times = traj.times();
    s.values.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double worst = 0.0;
        for (int i = 0; i < traj.num_agents(); ++i)
            worst = std::max(worst, phi.value(traj.agent_state(k, i)));
        s.values.push_back(worst);
    }
    return s;
}

/// max_i phi(x_i(t) - y(t)), the leader-follower monitor in the relative coordinate.
inline TimeSeries max_relative_phi_series(const Trajectory& traj, const ConvexLyapunov& phi) {
    if (!traj.has_leader())
        throw std::invalid_argument("max_relative_phi_series: trajectory has no leader");
    if (phi.dim() != traj.dim())
        throw std::invalid_argument("max_relative_phi_series: dimension mismatch");
    TimeSeries s;
    s.times = traj.times();
    s.values.reserve(traj.size());
    Vec rel(static_cast<std::size_t>(traj.dim()));
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto y = traj.leader_state(k);
        double worst = 0.0;
        for (int i = 0; i < traj.num_agents(); ++i) {
            const auto xi = traj.agent_state(k, i);
            for (int d = 0; d < traj.dim(); ++d)
                rel[d] = xi[d] - y[d];
            worst = std::max(worst, phi.value(rel));
        }
        s.values.push_back(worst);
    }
    return s;
}

struct MonotoneResult {
    bool ok = true;
    std::size_t first_violation = 0;  // index k where v[k+1] broke the band
};

/// Non-increase up to the per-step tolerance band v_{k+1} <= v_k + abs + rel (1 + |v_k|).
inline MonotoneResult check_monotone(const TimeSeries& series, double tol_abs = 1e-9,
                                     double tol_rel = 1e-7) {
    if (series.values.empty())
        throw std::invalid_argument("check_monotone: series must be non-empty");
    for (std::size_t k = 0; k + 1 < series.values.size(); ++k) {
        const double bound = series.values[k] + tol_abs + tol_rel * (1.0 + std::fabs(series.values[k]));
        if (series.values[k + 1] > bound)
            return {false, k};
    }
    return {true, 0};
}

/// Trailing-window detector for phi-synchronization: over the last `window` seconds the
/// agent spread of phi must stay below eps at every sample and the max-phi curve must be
/// flat (total variation below eps). Returns the common value estimate d_star.
inline std::optional<double> detect_phi_sync(const Trajectory& traj, const ConvexLyapunov& phi,
                                             double eps, double window) {
    if (traj.size() < 2)
        throw std::invalid_argument("detect_phi_sync: trajectory too short");
    const double t_last = traj.time(traj.size() - 1);
    const double t_first = traj.time(0);
    if (t_last - t_first < window)
        throw std::invalid_argument("detect_phi_sync: trajectory shorter than the window");

    std::size_t begin = traj.size() - 1;
    while (begin > 0 && traj.time(begin - 1) >= t_last - window)
        --begin;

    double prev_max = 0.0;
    double total_variation = 0.0;
    double mean_accum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = begin; k < traj.size(); ++k) {
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (int i = 0; i < traj.num_agents(); ++i) {
            const double v = phi.value(traj.agent_state(k, i));
            hi = std::max(hi, v);
            lo = std::min(lo, v);
            sum += v;
        }
        if (hi - lo >= eps)
            return std::nullopt;
        if (count > 0)
            total_variation += std::fabs(hi - prev_max);
        prev_max = hi;
        mean_accum += sum / traj.num_agents();
        ++count;
    }
    if (total_variation >= eps)
        return std::nullopt;
    return mean_accum / static_cast<double>(count);
}

struct EnvelopeResult {
    bool ok = true;
    std::size_t first_violation = 0;
};

/// v(t_k) <= gamma e^{-lambda (t_k - t0)} v(t0) (1 + tol_rel) + tol_abs for all k.
/// The absolute floor covers the v(t0) = 0 case, where the envelope itself is zero.
inline EnvelopeResult check_exponential_envelope(const TimeSeries& series, double t0, double gamma,
                                                 double lambda, double tol_rel,
                                                 double tol_abs = 1e-12) {
    if (series.values.empty())
        throw std::invalid_argument("check_exponential_envelope: series must be non-empty");
    if (gamma < 1.0)
        throw std::invalid_argument("check_exponential_envelope: gamma must be >= 1");
    if (!(lambda > 0.0))
        throw std::invalid_argument("check_exponential_envelope: lambda must be positive");
    const double v0 = series.values.front();
    for (std::size_t k = 0; k < series.values.size(); ++k) {
        const double bound =
            gamma * std::exp(-lambda * (series.times[k] - t0)) * v0 * (1.0 + tol_rel) + tol_abs;
        if (series.values[k] > bound)
            return {false, k};
    }
    return {true, 0};
}

}  // namespace syncnet
