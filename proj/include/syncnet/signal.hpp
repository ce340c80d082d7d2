#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "syncnet/graph.hpp"

namespace syncnet {

/// One piece of the piecewise-constant graph signal.
struct Segment {
    Graph graph;
    double duration = 0.0;  // seconds
};

enum class Extension { HoldLast, Periodic };

/// Piecewise-constant switching signal sigma(t). Segments are stored by duration,
/// so contiguity holds by construction; switch instants belong to the new segment.
class SwitchingSignal {
public:
    SwitchingSignal() : segments_{Segment{WeightedDigraph{1}, 1.0}} {}
    SwitchingSignal(std::vector<Segment> segments, double start_time, Extension extension)
        : segments_(std::move(segments)), start_time_(start_time), extension_(extension) {
        if (segments_.empty())
            throw std::invalid_argument("SwitchingSignal: needs at least one segment");
        for (const Segment& s : segments_)
            if (!(s.duration > 0.0))
                throw std::invalid_argument("SwitchingSignal: segment duration must be positive");
    }

    const std::vector<Segment>& segments() const { return segments_; }
    double start_time() const { return start_time_; }
    Extension extension() const { return extension_; }

    double period() const {
        double total = 0.0;
        for (const Segment& s : segments_)
            total += s.duration;
        return total;
    }

    double end_time() const { return start_time_ + period(); }

    /// Local segment start offsets: cum[k] is where segment k begins, cum[K] = period.
    std::vector<double> cumulative_offsets() const {
        std::vector<double> cum(segments_.size() + 1, 0.0);
        for (std::size_t k = 0; k < segments_.size(); ++k)
            cum[k + 1] = cum[k] + segments_[k].duration;
        return cum;
    }

    int num_agents() const { return syncnet::num_agents(segments_.front().graph); }

    bool has_leader() const {
        for (const Segment& s : segments_)
            if (is_leader_graph(s.graph))
                return true;
        return false;
    }

private:
    std::vector<Segment> segments_;
    double start_time_ = 0.0;
    Extension extension_ = Extension::HoldLast;
};

struct ValidationIssue {
    enum class Kind { EmptySignal, DwellTime, WeightBand, LeaderWeightFloor, InvalidBand };
    Kind kind;
    int segment = -1;  // -1 when not tied to a segment
    std::string message;
};

/// Checks the standing assumptions: dwell time, weight band, leader weight floor.
inline std::vector<ValidationIssue> validate_signal(const SwitchingSignal& signal, double tau_d,
                                                    double a_lo, double a_hi,
                                                    std::optional<double> b_lo = std::nullopt) {
    std::vector<ValidationIssue> issues;
    auto add = [&](ValidationIssue::Kind kind, int seg, std::string msg) {
        issues.push_back({kind, seg, std::move(msg)});
    };

    if (!(tau_d > 0.0))
        add(ValidationIssue::Kind::InvalidBand, -1, "dwell time must be positive");
    if (!(a_lo > 0.0) || !(a_lo <= a_hi))
        add(ValidationIssue::Kind::InvalidBand, -1, "weight band requires 0 < a_lo <= a_hi");
    if (b_lo && !(*b_lo > 0.0))
        add(ValidationIssue::Kind::InvalidBand, -1, "leader weight floor must be positive");

    const int n = signal.num_agents();
    for (std::size_t k = 0; k < signal.segments().size(); ++k) {
        const Segment& seg = signal.segments()[k];
        if (seg.duration < tau_d) {
            std::ostringstream os;
            os << "dwell-time violation at segment " << k << ": duration " << seg.duration
               << " < tau_D " << tau_d;
            add(ValidationIssue::Kind::DwellTime, static_cast<int>(k), os.str());
        }
        if (syncnet::num_agents(seg.graph) != n) {
            add(ValidationIssue::Kind::InvalidBand, static_cast<int>(k),
                "segment agent count differs from the first segment");
            continue;
        }
        for (const Edge& e : follower_part(seg.graph).edges()) {
            if (e.weight < a_lo || e.weight > a_hi) {
                std::ostringstream os;
                os << "weight-band violation at segment " << k << ": edge " << e.source + 1 << "->"
                   << e.target + 1 << " weight " << e.weight << " outside [" << a_lo << ", " << a_hi
                   << "]";
                add(ValidationIssue::Kind::WeightBand, static_cast<int>(k), os.str());
            }
        }
        if (const auto* lg = std::get_if<LeaderGraph>(&seg.graph); lg && b_lo) {
            for (const LeaderEdge& e : lg->leader_edges()) {
                if (e.weight < *b_lo) {
                    std::ostringstream os;
                    os << "leader-weight violation at segment " << k << ": edge 0->" << e.target + 1
                       << " weight " << e.weight << " below b_lo " << *b_lo;
                    add(ValidationIssue::Kind::LeaderWeightFloor, static_cast<int>(k), os.str());
                }
            }
        }
    }
    return issues;
}

namespace detail {

/// Fold an absolute time into the local offset coordinate [0, period).
inline double fold_local(const SwitchingSignal& signal, double t) {
    const double period = signal.period();
    double tau = t - signal.start_time();
    if (signal.extension() == Extension::Periodic) {
        tau = std::fmod(tau, period);
        if (tau < 0.0)
            tau += period;
        return tau;
    }
    if (tau < 0.0)
        throw std::out_of_range("time before signal start");
    return tau;
}

/// Segment index active at local offset tau (hold-last clamps past the end).
inline std::size_t segment_index_local(const SwitchingSignal& signal, double tau) {
    const auto cum = signal.cumulative_offsets();
    if (tau >= cum.back())
        return signal.segments().size() - 1;  // hold-last tail
    std::size_t k = 0;
    while (k + 1 < cum.size() && tau >= cum[k + 1])
        ++k;
    return k;
}

}  // namespace detail

/// Graph active at time t; boundaries belong to the later segment.
inline const Graph& graph_at(const SwitchingSignal& signal, double t) {
    const double tau = detail::fold_local(signal, t);
    return signal.segments()[detail::segment_index_local(signal, tau)].graph;
}

/// Presence-only union of all graphs active during [t1, t2). Returns a LeaderGraph
/// exactly when any contributing segment carries leader edges.
inline Graph union_graph(const SwitchingSignal& signal, double t1, double t2) {
    if (!(t1 < t2))
        throw std::invalid_argument("union_graph: empty interval");

    const int n = signal.num_agents();
    WeightedDigraph followers(n);
    std::vector<bool> leader_targets(n, false);
    bool any_leader_segment = false;

    auto absorb = [&](const Graph& g) {
        for (const Edge& e : follower_part(g).edges())
            if (!followers.has_edge(e.source, e.target))
                followers.add_edge(e.source, e.target, 1.0);
        if (const auto* lg = std::get_if<LeaderGraph>(&g)) {
            any_leader_segment = true;
            for (const LeaderEdge& e : lg->leader_edges())
                leader_targets[e.target] = true;
        }
    };

    const double period = signal.period();
    double remaining = t2 - t1;
    if (signal.extension() == Extension::Periodic && remaining >= period) {
        for (const Segment& s : signal.segments())
            absorb(s.graph);
    } else {
        const auto cum = signal.cumulative_offsets();
        double tau = detail::fold_local(signal, t1);
        std::size_t k = detail::segment_index_local(signal, tau);
        while (remaining > 0.0) {
            absorb(signal.segments()[k].graph);
            if (signal.extension() == Extension::HoldLast && k + 1 == signal.segments().size())
                break;  // final graph persists forever
            const double take = cum[k + 1] - tau;
            remaining -= take;
            ++k;
            if (k == signal.segments().size()) {
                k = 0;
                tau = 0.0;
            } else {
                tau = cum[k];
            }
        }
    }

    if (!any_leader_segment)
        return followers;
    LeaderGraph out(std::move(followers));
    for (int i = 0; i < n; ++i)
        if (leader_targets[i])
            out.add_leader_edge(i, 1.0);
    return out;
}

enum class JointMode { Strong, Leader, ConnectedUndirected };

namespace detail {

inline bool union_window_ok(const SwitchingSignal& signal, double t, double T, JointMode mode) {
    const Graph u = union_graph(signal, t, t + T);
    switch (mode) {
        case JointMode::Strong:
            return is_strongly_connected(follower_part(u));
        case JointMode::Leader: {
            if (const auto* lg = std::get_if<LeaderGraph>(&u))
                return is_leader_connected(*lg);
            return false;  // no leader edges anywhere in the window
        }
        case JointMode::ConnectedUndirected:
            return is_connected_undirected(follower_part(u));
    }
    return false;
}

}  // namespace detail

/// Definition-1(i) / Definition-4(ii) style check: every window [t, t+T) has a connected
/// union. The union over a sliding window only changes at segment boundaries and at
/// boundaries minus T, and connectivity is monotone in the edge set, so checking these
/// finitely many window starts decides the quantifier exactly. Periodic signals are
/// decided for all t >= t0; hold-last signals over the covered horizon.
inline bool check_uniform_joint_connectivity(const SwitchingSignal& signal, double T,
                                             JointMode mode) {
    if (!(T > 0.0))
        throw std::invalid_argument("check_uniform_joint_connectivity: T must be positive");

    const double t0 = signal.start_time();
    const auto cum = signal.cumulative_offsets();
    std::vector<double> starts;

    if (signal.extension() == Extension::Periodic) {
        const double period = signal.period();
        auto push_folded = [&](double local) {
            double v = std::fmod(local, period);
            if (v < 0.0)
                v += period;
            starts.push_back(t0 + v);
        };
        for (double c : cum) {
            push_folded(c);
            push_folded(c - T);
        }
    } else {
        const double horizon_end = std::max(t0, signal.end_time() - T);
        starts.push_back(t0);
        starts.push_back(horizon_end);
        for (double c : cum) {
            for (double cand : {t0 + c, t0 + c - T})
                if (cand >= t0 && cand <= horizon_end)
                    starts.push_back(cand);
        }
    }

    for (double t : starts)
        if (!detail::union_window_ok(signal, t, T, mode))
            return false;
    return true;
}

/// Definition-1(ii) / Definition-4(iii): every infinite suffix has a connected union.
/// Exact for both representable extensions: a periodic suffix always contains every
/// segment, and a hold-last suffix eventually equals the final graph alone.
inline bool check_infinite_joint_connectivity(const SwitchingSignal& signal, JointMode mode) {
    if (mode == JointMode::ConnectedUndirected) {
        for (std::size_t k = 0; k < signal.segments().size(); ++k)
            if (!follower_part(signal.segments()[k].graph).is_undirected())
                throw std::invalid_argument("mode requires undirected segments (segment " +
                                            std::to_string(k) + " is directed)");
    }

    if (signal.extension() == Extension::Periodic) {
        return detail::union_window_ok(signal, signal.start_time(), signal.period(), mode);
    }
    // Hold-last: suffixes are supersets of the final graph, which persists alone.
    const double tail_start = signal.end_time() - signal.segments().back().duration;
    return detail::union_window_ok(signal, tail_start, signal.segments().back().duration, mode);
}

}  // namespace syncnet
