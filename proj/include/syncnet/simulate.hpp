#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "syncnet/dynamics.hpp"
#include "syncnet/graph.hpp"
#include "syncnet/signal.hpp"

namespace syncnet {

/// View of the network at one sample instant; y is empty for leaderless runs.
struct NetworkState {
    double t = 0.0;
    int num_agents = 0;
    int dim = 0;
    std::span<const double> x;  // row-major, num_agents * dim
    std::span<const double> y;

    std::span<const double> agent(int i) const {
        return x.subspan(static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim));
    }
};

/// Sampled trajectory with flat storage; samples land on the uniform output grid
/// t0 + k * (stride * h), independent of where switch instants cut the integration.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(int num_agents, int dim, bool has_leader, double step, std::uint64_t fingerprint)
        : num_agents_(num_agents), dim_(dim), has_leader_(has_leader), step_(step),
          fingerprint_(fingerprint) {}

    int num_agents() const { return num_agents_; }
    int dim() const { return dim_; }
    bool has_leader() const { return has_leader_; }
    double step() const { return step_; }
    std::uint64_t fingerprint() const { return fingerprint_; }
    std::size_t size() const { return times_.size(); }

    void append(double t, std::span<const double> states, std::span<const double> leader) {
        if (!times_.empty() && !(t > times_.back()))
            throw std::invalid_argument("Trajectory::append: sample times must increase");
        if (static_cast<int>(states.size()) != num_agents_ * dim_)
            throw std::invalid_argument("Trajectory::append: state size mismatch");
        if (has_leader_ && static_cast<int>(leader.size()) != dim_)
            throw std::invalid_argument("Trajectory::append: leader size mismatch");
        times_.push_back(t);
        states_.insert(states_.end(), states.begin(), states.end());
        if (has_leader_)
            leader_.insert(leader_.end(), leader.begin(), leader.end());
    }

    double time(std::size_t k) const { return times_[k]; }
    const std::vector<double>& times() const { return times_; }

    std::span<const double> states(std::size_t k) const {
        const std::size_t w = static_cast<std::size_t>(num_agents_) * dim_;
        return {states_.data() + k * w, w};
    }

    std::span<const double> agent_state(std::size_t k, int agent) const {
        return states(k).subspan(static_cast<std::size_t>(agent) * dim_,
                                 static_cast<std::size_t>(dim_));
    }

    std::span<const double> leader_state(std::size_t k) const {
        if (!has_leader_)
            return {};
        return {leader_.data() + k * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }

    NetworkState sample(std::size_t k) const {
        return {times_[k], num_agents_, dim_, states(k), leader_state(k)};
    }

private:
    int num_agents_ = 0;
    int dim_ = 0;
    bool has_leader_ = false;
    double step_ = 0.0;
    std::uint64_t fingerprint_ = 0;
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<double> leader_;
};

/// Coupling input for one agent: sum of a_ij (x_j - x_i) over in-edges, plus
/// b_i (y - x_i) when a leader edge targets the agent.
inline Vec coupling_term(const Graph& g, std::span<const double> x,
                         std::span<const double> y, int agent) {
    const int n_agents = num_agents(g);
    if (n_agents == 0 || x.size() % static_cast<std::size_t>(n_agents) != 0)
        throw std::invalid_argument("coupling_term: state size not divisible by agent count");
    const int dim = static_cast<int>(x.size()) / n_agents;
    if (agent < 0 || agent >= n_agents)
        throw std::invalid_argument("coupling_term: agent index out of range");

    Vec out(static_cast<std::size_t>(dim), 0.0);
    const std::size_t base = static_cast<std::size_t>(agent) * dim;
    for (const Edge& e : follower_part(g).edges()) {
        if (e.target != agent)
            continue;
        const std::size_t src = static_cast<std::size_t>(e.source) * dim;
        for (int d = 0; d < dim; ++d)
            out[d] += e.weight * (x[src + d] - x[base + d]);
    }
    if (const auto* lg = std::get_if<LeaderGraph>(&g)) {
        for (const LeaderEdge& e : lg->leader_edges()) {
            if (e.target != agent)
                continue;
            if (static_cast<int>(y.size()) != dim)
                throw std::invalid_argument("coupling_term: leader edge present but no leader state");
            for (int d = 0; d < dim; ++d)
                out[d] += e.weight * (y[d] - x[base + d]);
        }
    }
    return out;
}

namespace detail {

inline void throw_blow_up(double t) {
    std::ostringstream os;
    os << "numerical blow-up at t=" << t;
    throw std::runtime_error(os.str());
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

/// One classical RK4 increment h/6 (k1 + 2k2 + 2k3 + k4), written into delta.
template <typename Deriv>
void rk4_increment(Deriv&& deriv, double t, double h, const std::vector<double>& state,
                   std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
                   std::vector<double>& k4, std::vector<double>& stage,
                   std::vector<double>& delta) {
    const std::size_t n = state.size();
    deriv(t, std::span<const double>(state), std::span<double>(k1));
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = state[i] + 0.5 * h * k1[i];
    deriv(t + 0.5 * h, std::span<const double>(stage), std::span<double>(k2));
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = state[i] + 0.5 * h * k2[i];
    deriv(t + 0.5 * h, std::span<const double>(stage), std::span<double>(k3));
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = state[i] + h * k3[i];
    deriv(t + h, std::span<const double>(stage), std::span<double>(k4));
    const double w = h / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        delta[i] = w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

/// Kahan-compensated state accumulation: keeps the per-step rounding of x += delta
/// from drowning the O(h^4) discretization error on long runs.
inline void apply_compensated(std::vector<double>& state, const std::vector<double>& delta,
                              std::vector<double>& compensation) {
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double y = delta[i] - compensation[i];
        const double t = state[i] + y;
        compensation[i] = (t - state[i]) - y;
        state[i] = t;
    }
}

}  // namespace detail

/// Classical fixed-step RK4 update. Throws on non-finite derivative or state.
inline Vec rk4_step(const std::function<Vec(double, const Vec&)>& derivative, double t,
                    const Vec& state, double h) {
    if (!(h > 0.0))
        throw std::invalid_argument("rk4_step: h must be positive");
    Vec k1(state.size()), k2(state.size()), k3(state.size()), k4(state.size());
    Vec stage(state.size()), delta(state.size());
    Vec out = state;
    auto eval = [&](double tt, std::span<const double> s, std::span<double> dst) {
        Vec in(s.begin(), s.end());
        Vec d = derivative(tt, in);
        if (d.size() != s.size())
            throw std::invalid_argument("rk4_step: derivative size mismatch");
        if (!detail::all_finite(d))
            detail::throw_blow_up(tt);
        std::copy(d.begin(), d.end(), dst.begin());
    };
    detail::rk4_increment(eval, t, h, out, k1, k2, k3, k4, stage, delta);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += delta[i];
    if (!detail::all_finite(out))
        detail::throw_blow_up(t + h);
    return out;
}

/// Step boundaries covering [t0, t_end]: the uniform h-grid anchored at t0, cut at
/// every switch instant of the signal, so no interval straddles a discontinuity.
inline std::vector<double> switching_aware_schedule(const SwitchingSignal& signal, double t0,
                                                    double t_end, double h) {
    if (!(t0 < t_end))
        throw std::invalid_argument("switching_aware_schedule: need t0 < t_end");
    if (!(h > 0.0))
        throw std::invalid_argument("switching_aware_schedule: h must be positive");

    // switch instants strictly inside (t0, t_end), by occurrence walk
    std::vector<double> cuts;
    {
        const auto cum = signal.cumulative_offsets();
        const std::size_t n_seg = signal.segments().size();
        double tau = detail::fold_local(signal, t0);
        std::size_t k = detail::segment_index_local(signal, tau);
        const bool hold = signal.extension() == Extension::HoldLast;
        if (!(hold && k + 1 == n_seg) && n_seg > 1) {
            double boundary = t0 + (cum[k + 1] - tau);
            while (boundary < t_end) {
                cuts.push_back(boundary);
                ++k;
                if (k == n_seg) {
                    if (hold)
                        break;
                    k = 0;
                }
                if (hold && k + 1 == n_seg)
                    break;  // final segment persists
                boundary += signal.segments()[k].duration;
            }
        }
    }

    const double eps = h * 1e-9;
    std::vector<double> boundaries{t0};
    std::size_t cut_pos = 0;
    for (long j = 1;; ++j) {
        double g = t0 + static_cast<double>(j) * h;
        const bool last = g >= t_end - eps;
        if (last)
            g = t_end;
        while (cut_pos < cuts.size() && cuts[cut_pos] < g - eps) {
            if (cuts[cut_pos] > boundaries.back() + eps)
                boundaries.push_back(cuts[cut_pos]);
            ++cut_pos;
        }
        // a cut coinciding with a grid point must not duplicate it
        while (cut_pos < cuts.size() && cuts[cut_pos] <= g + eps)
            ++cut_pos;
        if (g > boundaries.back() + eps)
            boundaries.push_back(g);
        if (last)
            break;
    }
    return boundaries;
}

/// Everything a single deterministic run needs, independent of any file format.
struct SimulationConfig {
    SwitchingSignal signal{{Segment{WeightedDigraph{1}, 1.0}}, 0.0, Extension::HoldLast};
    DynamicsSpec dynamics = ZeroDynamics{1};
    std::vector<Vec> initial_states;
    std::optional<Vec> leader_initial;
    double step = 1e-3;
    double t_end = 1.0;
    int output_stride = 10;
    std::uint64_t fingerprint = 0;
};

namespace detail {

struct SegmentOps {
    std::vector<std::vector<std::pair<int, double>>> in_edges;  // per target agent
    std::vector<double> leader_weight;                          // 0 when absent
};

inline SegmentOps make_segment_ops(const Graph& g, int n_agents) {
    SegmentOps ops;
    ops.in_edges.resize(n_agents);
    ops.leader_weight.assign(n_agents, 0.0);
    for (const Edge& e : follower_part(g).edges())
        ops.in_edges[e.target].push_back({e.source, e.weight});
    if (const auto* lg = std::get_if<LeaderGraph>(&g))
        for (const LeaderEdge& e : lg->leader_edges())
            ops.leader_weight[e.target] = e.weight;
    return ops;
}

}  // namespace detail

/// Integrates the coupled network with fixed-step RK4, cutting steps at switch
/// instants; identical configs produce bit-identical trajectories.
inline Trajectory simulate(const SimulationConfig& cfg) {
    const int n_agents = cfg.signal.num_agents();
    const int dim = dimension(cfg.dynamics);
    const bool has_leader = cfg.leader_initial.has_value();

    if (static_cast<int>(cfg.initial_states.size()) != n_agents)
        throw std::invalid_argument("simulate: initial state count must match agent count");
    for (const Vec& x : cfg.initial_states)
        if (static_cast<int>(x.size()) != dim)
            throw std::invalid_argument("simulate: initial state dimension mismatch");
    if (has_leader && static_cast<int>(cfg.leader_initial->size()) != dim)
        throw std::invalid_argument("simulate: leader state dimension mismatch");
    if (cfg.signal.has_leader() && !has_leader)
        throw std::invalid_argument("simulate: signal has leader edges but no leader state given");
    if (!(cfg.step > 0.0))
        throw std::invalid_argument("simulate: step must be positive");
    if (cfg.output_stride < 1)
        throw std::invalid_argument("simulate: output stride must be >= 1");
    const double t0 = cfg.signal.start_time();
    if (!(cfg.t_end > t0))
        throw std::invalid_argument("simulate: t_end must exceed the signal start time");

    // flat state: follower blocks then optional leader block
    std::vector<double> state;
    state.reserve(static_cast<std::size_t>(n_agents + (has_leader ? 1 : 0)) * dim);
    for (const Vec& x : cfg.initial_states)
        state.insert(state.end(), x.begin(), x.end());
    if (has_leader)
        state.insert(state.end(), cfg.leader_initial->begin(), cfg.leader_initial->end());

    std::vector<detail::SegmentOps> ops;
    ops.reserve(cfg.signal.segments().size());
    for (const Segment& s : cfg.signal.segments())
        ops.push_back(detail::make_segment_ops(s.graph, n_agents));

    const std::size_t follower_size = static_cast<std::size_t>(n_agents) * dim;
    auto deriv_for = [&](std::size_t seg) {
        return [&, seg](double t, std::span<const double> s, std::span<double> out) {
            const detail::SegmentOps& op = ops[seg];
            for (int i = 0; i < n_agents; ++i) {
                const std::size_t base = static_cast<std::size_t>(i) * dim;
                eval_vector_field(cfg.dynamics, t, s.subspan(base, dim), out.subspan(base, dim));
                for (const auto& [src, w] : op.in_edges[i]) {
                    const std::size_t sb = static_cast<std::size_t>(src) * dim;
                    for (int d = 0; d < dim; ++d)
                        out[base + d] += w * (s[sb + d] - s[base + d]);
                }
                if (has_leader && op.leader_weight[i] > 0.0) {
                    const double b = op.leader_weight[i];
                    for (int d = 0; d < dim; ++d)
                        out[base + d] += b * (s[follower_size + d] - s[base + d]);
                }
            }
            if (has_leader)
                eval_vector_field(cfg.dynamics, t, s.subspan(follower_size, dim),
                                  out.subspan(follower_size, dim));
        };
    };

    Trajectory traj(n_agents, dim, has_leader, cfg.step, cfg.fingerprint);
    auto record = [&](double t) {
        traj.append(t, std::span<const double>(state.data(), follower_size),
                    has_leader
                        ? std::span<const double>(state.data() + follower_size, dim)
                        : std::span<const double>{});
    };

    // occurrence walk: (segment k, absolute end of its current occurrence)
    const auto cum = cfg.signal.cumulative_offsets();
    const std::size_t n_seg = cfg.signal.segments().size();
    const bool hold = cfg.signal.extension() == Extension::HoldLast;
    const double inf = std::numeric_limits<double>::infinity();

    double tau0 = detail::fold_local(cfg.signal, t0);
    std::size_t seg = detail::segment_index_local(cfg.signal, tau0);
    double occ_end =
        (n_seg == 1 || (hold && seg + 1 == n_seg)) ? inf : t0 + (cum[seg + 1] - tau0);
    auto advance_occurrence = [&]() {
        ++seg;
        if (seg == n_seg)
            seg = 0;  // periodic wrap; hold-last never reaches here
        if (hold && seg + 1 == n_seg)
            occ_end = inf;
        else
            occ_end += cfg.signal.segments()[seg].duration;
    };

    const double h = cfg.step;
    const double eps = h * 1e-9;
    std::vector<double> k1(state.size()), k2(state.size()), k3(state.size()),
        k4(state.size()), stage(state.size()), delta(state.size());
    std::vector<double> compensation(state.size(), 0.0);
    auto step_to = [&](double from, double to) {
        detail::rk4_increment(deriv_for(seg), from, to - from, state, k1, k2, k3, k4, stage,
                              delta);
        detail::apply_compensated(state, delta, compensation);
        if (!detail::all_finite(state))
            detail::throw_blow_up(to);
    };

    record(t0);
    double t = t0;
    for (long j = 1;; ++j) {
        double target = t0 + static_cast<double>(j) * h;
        const bool final_step = target >= cfg.t_end - eps;
        if (final_step)
            target = cfg.t_end;

        while (occ_end < target - eps) {
            if (occ_end > t + eps)
                step_to(t, occ_end);
            t = occ_end;
            advance_occurrence();
        }
        if (target > t + eps)
            step_to(t, target);
        t = target;
        while (occ_end <= t + eps)
            advance_occurrence();  // switch lands exactly on a grid point

        if (j % cfg.output_stride == 0)
            record(t);
        if (final_step)
            break;
    }
    return traj;
}

}  // namespace syncnet
