#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "syncnet/metrics.hpp"
#include "syncnet/simulate.hpp"
#include "test_support.hpp"

using namespace syncnet;
using Catch::Approx;

TEST_CASE("rk4 on scalar decay matches the exponential to high order") {
    const auto deriv = [](double, const Vec& x) { return Vec{-x[0]}; };
    const Vec next = rk4_step(deriv, 0.0, Vec{1.0}, 0.1);
    CHECK(next[0] == Approx(std::exp(-0.1)).margin(1e-8));
}

TEST_CASE("rk4 leaves the state unchanged under a zero field") {
    const auto deriv = [](double, const Vec& x) { return Vec(x.size(), 0.0); };
    const Vec next = rk4_step(deriv, 2.0, Vec{0.25, -3.0}, 0.7);
    CHECK(next[0] == 0.25);
    CHECK(next[1] == -3.0);
}

TEST_CASE("rk4 integrates a constant field exactly") {
    const auto deriv = [](double, const Vec&) { return Vec{1.0}; };
    const Vec next = rk4_step(deriv, 0.0, Vec{0.0}, 0.5);
    CHECK(next[0] == 0.5);
}

TEST_CASE("rk4 reports a blow-up with the offending time") {
    const auto deriv = [](double, const Vec&) {
        return Vec{std::numeric_limits<double>::infinity()};
    };
    CHECK_THROWS_WITH(rk4_step(deriv, 1.5, Vec{0.0}, 0.1),
                      Catch::Matchers::ContainsSubstring("blow-up"));
}

TEST_CASE("schedule subdivides by h and cuts at the switch instant") {
    WeightedDigraph a(2), b(2);
    a.add_edge(0, 1, 1.0);
    b.add_edge(1, 0, 1.0);
    SwitchingSignal sig({{a, 1.0}, {b, 1.0}}, 0.0, Extension::HoldLast);
    const auto bounds = switching_aware_schedule(sig, 0.0, 1.2, 0.4);
    REQUIRE(bounds.size() == 5);
    CHECK(bounds[0] == Approx(0.0).margin(0.0));
    CHECK(bounds[1] == Approx(0.4));
    CHECK(bounds[2] == Approx(0.8));
    CHECK(bounds[3] == Approx(1.0));
    CHECK(bounds[4] == Approx(1.2));
}

TEST_CASE("schedule is a uniform grid when nothing switches") {
    WeightedDigraph g(2);
    g.add_edge(0, 1, 1.0);
    SwitchingSignal sig({{g, 10.0}}, 0.0, Extension::HoldLast);
    const auto bounds = switching_aware_schedule(sig, 0.0, 1.0, 0.25);
    REQUIRE(bounds.size() == 5);
    for (std::size_t i = 0; i < bounds.size(); ++i)
        CHECK(bounds[i] == Approx(0.25 * static_cast<double>(i)).margin(1e-12));
}

TEST_CASE("a switch instant on a grid point produces no duplicate boundary") {
    WeightedDigraph a(2), b(2);
    a.add_edge(0, 1, 1.0);
    b.add_edge(1, 0, 1.0);
    SwitchingSignal sig({{a, 0.5}, {b, 0.5}}, 0.0, Extension::HoldLast);
    const auto bounds = switching_aware_schedule(sig, 0.0, 1.0, 0.25);
    REQUIRE(bounds.size() == 5);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
        CHECK(bounds[i] < bounds[i + 1]);
}

TEST_CASE("schedule intervals never exceed h and hit every switch instant") {
    SampleRng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const SwitchingSignal sig = testsupport::random_signal(rng, 3, 0.31, 0.5, 2.0);
        const double h = rng.uniform(0.05, 0.4);
        const double t_end = rng.uniform(1.0, 6.0);
        const auto bounds = switching_aware_schedule(sig, 0.0, t_end, h);
        REQUIRE(bounds.front() == 0.0);
        REQUIRE(bounds.back() == Approx(t_end).margin(1e-12));
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
            CHECK(bounds[i + 1] - bounds[i] <= h * (1.0 + 1e-9));

        // every switch instant inside the span appears as a boundary
        const auto cum = sig.cumulative_offsets();
        const double period = sig.period();
        std::vector<double> instants;
        if (sig.extension() == Extension::Periodic) {
            for (double base = 0.0; base < t_end; base += period)
                for (std::size_t k = 1; k < cum.size(); ++k)
                    if (base + cum[k] > 0.0 && base + cum[k] < t_end)
                        instants.push_back(base + cum[k]);
        } else {
            for (std::size_t k = 1; k + 1 < cum.size(); ++k)
                if (cum[k] < t_end)
                    instants.push_back(cum[k]);
        }
        for (double s : instants) {
            bool found = false;
            for (double b : bounds)
                if (std::fabs(b - s) <= 1e-9 * std::max(1.0, s))
                    found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("schedule grids anchor at the requested start time") {
    WeightedDigraph a(2), b(2);
    a.add_edge(0, 1, 1.0);
    b.add_edge(1, 0, 1.0);
    SwitchingSignal sig({{a, 1.0}, {b, 1.0}}, 0.0, Extension::Periodic);
    const auto bounds = switching_aware_schedule(sig, 0.3, 1.5, 0.4);
    REQUIRE(bounds.front() == Approx(0.3).margin(0.0));
    REQUIRE(bounds.back() == Approx(1.5).margin(1e-12));
    // the switch at t = 1 sits between the grid points 0.7 and 1.1
    bool has_switch = false;
    for (double x : bounds)
        if (x == Approx(1.0).margin(1e-12))
            has_switch = true;
    CHECK(has_switch);
}

TEST_CASE("coupling term sums weighted in-neighbour differences") {
    WeightedDigraph g(2);
    g.add_edge(1, 0, 1.0);
    const Vec x{0.0, 2.0};
    const Vec term = coupling_term(Graph{g}, x, {}, 0);
    CHECK(term[0] == Approx(2.0));
    const Vec none = coupling_term(Graph{g}, x, {}, 1);
    CHECK(none[0] == 0.0);
}

TEST_CASE("leader edge pulls toward the leader state") {
    LeaderGraph g(WeightedDigraph(1));
    g.add_leader_edge(0, 1.0);
    const Vec x{0.0};
    const Vec y{1.0};
    const Vec term = coupling_term(Graph{g}, x, y, 0);
    CHECK(term[0] == Approx(1.0));
}

TEST_CASE("two-agent consensus follows the closed form") {
    const auto traj = simulate(testsupport::two_agent_closed_form(1e-3, 1.0));
    const auto last = traj.states(traj.size() - 1);
    CHECK(traj.time(traj.size() - 1) == Approx(1.0).margin(1e-12));
    CHECK(last[0] == Approx(std::exp(-2.0)).margin(1e-6));
    CHECK(last[1] == Approx(-std::exp(-2.0)).margin(1e-6));
    CHECK(last[0] - last[1] == Approx(2.0 * std::exp(-2.0)).margin(1e-6));
}

TEST_CASE("single follower tracks the leader along a scalar linear decay") {
    LeaderGraph g(WeightedDigraph(1));
    g.add_leader_edge(0, 1.0);
    SimulationConfig cfg;
    cfg.signal = SwitchingSignal({{g, 1.0}}, 0.0, Extension::Periodic);
    cfg.dynamics = ZeroDynamics{1};
    cfg.initial_states = {{1.0}};
    cfg.leader_initial = Vec{0.0};
    cfg.step = 1e-3;
    cfg.t_end = 1.0;
    const auto traj = simulate(cfg);
    const auto last = traj.states(traj.size() - 1);
    CHECK(last[0] == Approx(std::exp(-1.0)).margin(1e-6));
    CHECK(traj.leader_state(traj.size() - 1)[0] == 0.0);
}

TEST_CASE("identical initial states stay identical under any switching") {
    SampleRng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const int n_agents = rng.uniform_int(2, 5);
        const int dim = rng.uniform_int(1, 3);
        SimulationConfig cfg;
        cfg.signal = testsupport::random_signal(rng, n_agents, 0.3, 0.5, 2.0);
        cfg.dynamics = SaturatedDynamics{dim, 0.5, false};
        const Vec common = rng.uniform_vec(dim, -1.0, 1.0);
        cfg.initial_states.assign(n_agents, common);
        cfg.step = 1e-2;
        cfg.t_end = 3.0;
        const auto traj = simulate(cfg);
        for (std::size_t k = 0; k < traj.size(); ++k)
            CHECK(disagreement(traj.states(k), n_agents, dim) <= 1e-12);
    }
}

TEST_CASE("two runs of the same config are bit-identical") {
    const auto cfg = testsupport::two_agent_closed_form(1e-3, 2.0);
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.time(k) == b.time(k));
        const auto sa = a.states(k);
        const auto sb = b.states(k);
        CHECK(std::memcmp(sa.data(), sb.data(), sa.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("the leader trajectory ignores follower perturbations bit-for-bit") {
    LeaderGraph g(WeightedDigraph(2));
    g.add_leader_edge(0, 1.0);
    g.followers().add_edge(0, 1, 1.0);
    SimulationConfig cfg;
    cfg.signal = SwitchingSignal({{g, 1.0}}, 0.0, Extension::Periodic);
    cfg.dynamics = SkewRotationDynamics{2, {1.0}};
    cfg.initial_states = {{1.0, 0.0}, {0.0, 1.0}};
    cfg.leader_initial = Vec{0.5, -0.5};
    cfg.step = 1e-3;
    cfg.t_end = 2.0;
    const auto base = simulate(cfg);
    cfg.initial_states = {{-2.0, 0.3}, {0.9, 4.0}};
    const auto perturbed = simulate(cfg);
    REQUIRE(base.size() == perturbed.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        const auto ya = base.leader_state(k);
        const auto yb = perturbed.leader_state(k);
        CHECK(std::memcmp(ya.data(), yb.data(), ya.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("halving the step shrinks the closed-form error sixteen-fold") {
    const double exact = std::exp(-2.0);
    double errors[2];
    const double steps[2] = {1e-3, 5e-4};
    for (int i = 0; i < 2; ++i) {
        const auto traj = simulate(testsupport::two_agent_closed_form(steps[i], 1.0));
        const auto last = traj.states(traj.size() - 1);
        errors[i] = std::max(std::fabs(last[0] - exact), std::fabs(last[1] + exact));
    }
    CHECK(errors[0] < 1e-9);
    const double ratio = errors[0] / errors[1];
    CHECK(ratio > 12.8);
    CHECK(ratio < 19.2);
}

TEST_CASE("integration across switches matches a piecewise closed form") {
    // one-way coupling flips direction at t = 1; each half has a scalar linear solution
    WeightedDigraph a(2), b(2);
    a.add_edge(0, 1, 1.0);  // agent 2 chases agent 1
    b.add_edge(1, 0, 1.0);  // agent 1 chases agent 2
    SimulationConfig cfg;
    cfg.signal = SwitchingSignal({{a, 1.0}, {b, 1.0}}, 0.0, Extension::HoldLast);
    cfg.dynamics = ZeroDynamics{1};
    cfg.initial_states = {{1.0}, {0.0}};
    cfg.step = 1e-3;
    cfg.t_end = 2.0;
    const auto traj = simulate(cfg);
    // segment one: x1 = 1, x2 = 1 - e^{-t}; segment two: x1 chases the frozen x2
    const double x2_at_1 = 1.0 - std::exp(-1.0);
    const auto last = traj.states(traj.size() - 1);
    const double expected_x1 = x2_at_1 + (1.0 - x2_at_1) * std::exp(-1.0);
    CHECK(last[1] == Approx(x2_at_1).margin(1e-9));
    CHECK(last[0] == Approx(expected_x1).margin(1e-9));
}

TEST_CASE("simulate validates its inputs") {
    SimulationConfig cfg = testsupport::two_agent_closed_form(1e-3, 1.0);
    cfg.initial_states.pop_back();
    CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);

    SimulationConfig bad_step = testsupport::two_agent_closed_form(1e-3, 1.0);
    bad_step.step = 0.0;
    CHECK_THROWS_AS(simulate(bad_step), std::invalid_argument);
}
