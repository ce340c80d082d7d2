#pragma once

// Shared scenario and value builders for the unit and acceptance suites.

#include <optional>
#include <vector>

#include "syncnet/dynamics.hpp"
#include "syncnet/graph.hpp"
#include "syncnet/lyapunov.hpp"
#include "syncnet/sampling.hpp"
#include "syncnet/signal.hpp"
#include "syncnet/simulate.hpp"

namespace testsupport {

using namespace syncnet;

inline Matrix random_spd(SampleRng& rng, int n, double ridge = 0.1) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = rng.uniform(-1.0, 1.0);
    Matrix p = m.transposed() * m;
    for (int i = 0; i < n; ++i)
        p(i, i) += ridge;
    // force exact symmetry
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = avg;
            p(j, i) = avg;
        }
    return p;
}

/// SPD matrix commuting with a planar block rotation generator: one positive scale
/// per 2x2 block (plus a scalar for the trailing odd coordinate). These are exactly
/// the quadratic forms whose dissipation inner product vanishes for the rotation.
inline Matrix commuting_spd(SampleRng& rng, int n) {
    Matrix p(n, n);
    int i = 0;
    while (i + 1 < n) {
        const double s = rng.uniform(0.3, 3.0);
        p(i, i) = s;
        p(i + 1, i + 1) = s;
        i += 2;
    }
    if (i < n)
        p(i, i) = rng.uniform(0.3, 3.0);
    return p;
}

inline WeightedDigraph random_digraph(SampleRng& rng, int n, double edge_prob,
                                      double w_lo, double w_hi) {
    WeightedDigraph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && rng.uniform01() < edge_prob)
                g.add_edge(i, j, rng.uniform(w_lo, w_hi));
    return g;
}

inline SwitchingSignal random_signal(SampleRng& rng, int n, double tau_d, double w_lo,
                                     double w_hi, int min_segments = 3, int max_segments = 8,
                                     double edge_prob = 0.4) {
    const int k = rng.uniform_int(min_segments, max_segments);
    std::vector<Segment> segments;
    segments.reserve(k);
    for (int s = 0; s < k; ++s) {
        const double duration = tau_d * rng.uniform(1.0, 3.0);
        segments.push_back({random_digraph(rng, n, edge_prob, w_lo, w_hi), duration});
    }
    const Extension ext = rng.uniform01() < 0.5 ? Extension::Periodic : Extension::HoldLast;
    return SwitchingSignal(std::move(segments), 0.0, ext);
}

inline std::vector<Vec> random_states(SampleRng& rng, int n_agents, int dim, double box = 2.0) {
    std::vector<Vec> states;
    states.reserve(n_agents);
    for (int i = 0; i < n_agents; ++i)
        states.push_back(rng.uniform_vec(dim, -box, box));
    return states;
}

/// The closed-form pair: zero dynamics, both coupling edges at weight one, so
/// x1(t) = e^{-2t}, x2(t) = -e^{-2t}.
inline SimulationConfig two_agent_closed_form(double h, double t_end, int stride = 10) {
    WeightedDigraph g(2);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 0, 1.0);
    SimulationConfig cfg;
    cfg.signal = SwitchingSignal({{g, 1.0}}, 0.0, Extension::Periodic);
    cfg.dynamics = ZeroDynamics{1};
    cfg.initial_states = {{1.0}, {-1.0}};
    cfg.step = h;
    cfg.t_end = t_end;
    cfg.output_stride = stride;
    return cfg;
}

}  // namespace testsupport
