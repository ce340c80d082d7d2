#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "syncnet/certificates.hpp"
#include "syncnet/dynamics.hpp"
#include "syncnet/lyapunov.hpp"
#include "syncnet/signal.hpp"
#include "syncnet/simulate.hpp"

namespace syncnet {

using nlohmann::json;

struct PhiSyncConfig {
    double eps = 1e-3;
    double window = 5.0;
};

struct ConnectivityRequirement {
    JointMode mode = JointMode::Strong;
    std::optional<double> window;
};

inline const std::vector<std::string>& known_metric_names() {
    static const std::vector<std::string> names = {"disagreement", "max_phi", "lipschitz_v",
                                                   "leader_error"};
    return names;
}

struct MonitorConfig {
    std::vector<std::string> metrics;
    std::optional<PhiSyncConfig> phi_sync;
    std::optional<ConnectivityRequirement> connectivity;
};

/// Fully validated run description: network constants, dynamics, optional Lyapunov
/// candidate, switching signal, initial data, integration settings and monitors.
struct Scenario {
    std::string name;
    int num_agents = 1;
    int dimension = 1;
    double a_lo = 1.0;
    double a_hi = 1.0;
    double tau_d = 1.0;
    std::optional<double> window;
    std::optional<double> b_lo;
    DynamicsSpec dynamics = ZeroDynamics{1};
    std::optional<ConvexLyapunov> lyapunov;
    SwitchingSignal signal;
    std::vector<Vec> initial_states;
    std::optional<Vec> leader_initial;
    double step = 1e-3;
    double t_end = 1.0;
    int output_stride = 10;
    MonitorConfig monitors;

    bool has_leader() const { return leader_initial.has_value(); }

    /// Certificate inputs; available once a joint-connectivity window is declared.
    std::optional<NetworkParams> network_params() const {
        if (!window || num_agents < 2)
            return std::nullopt;
        NetworkParams p;
        p.num_agents = num_agents;
        p.a_lo = a_lo;
        p.a_hi = a_hi;
        p.tau_d = tau_d;
        p.window_T = *window;
        p.b_lo = b_lo;
        p.lipschitz = lipschitz_constant(dynamics);
        return p;
    }

    json canonical_json() const;
    std::uint64_t fingerprint() const;
    SimulationConfig to_simulation_config() const {
        SimulationConfig cfg;
        cfg.signal = signal;
        cfg.dynamics = dynamics;
        cfg.initial_states = initial_states;
        cfg.leader_initial = leader_initial;
        cfg.step = step;
        cfg.t_end = t_end;
        cfg.output_stride = output_stride;
        cfg.fingerprint = fingerprint();
        return cfg;
    }
};

struct ScenarioParseResult {
    std::optional<Scenario> scenario;
    std::vector<std::string> errors;

    bool ok() const { return scenario.has_value() && errors.empty(); }
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class JsonReader {
public:
    explicit JsonReader(std::vector<std::string>& errors) : errors_(errors) {}

    void fail(const std::string& path, const std::string& msg) {
        errors_.push_back(path + ": " + msg);
    }

    bool check_object(const json& j, const std::string& path,
                      std::initializer_list<const char*> allowed,
                      std::initializer_list<const char*> required) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        bool ok = true;
        for (const auto& [key, value] : j.items()) {
            if (std::find_if(allowed.begin(), allowed.end(),
                             [&](const char* a) { return key == a; }) == allowed.end()) {
                fail(path, "unknown field '" + key + "'");
                ok = false;
            }
        }
        for (const char* req : required) {
            if (!j.contains(req)) {
                fail(path, std::string("missing required field '") + req + "'");
                ok = false;
            }
        }
        return ok;
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        return j.get<double>();
    }

    std::optional<int> integer(const json& j, const std::string& path) {
        if (!j.is_number_integer()) {
            fail(path, "expected an integer");
            return std::nullopt;
        }
        return j.get<int>();
    }

    std::optional<std::string> string(const json& j, const std::string& path) {
        if (!j.is_string()) {
            fail(path, "expected a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    std::optional<Vec> number_array(const json& j, const std::string& path) {
        if (!j.is_array()) {
            fail(path, "expected an array of numbers");
            return std::nullopt;
        }
        Vec v;
        v.reserve(j.size());
        for (std::size_t i = 0; i < j.size(); ++i) {
            auto x = number(j[i], path + "[" + std::to_string(i) + "]");
            if (!x)
                return std::nullopt;
            v.push_back(*x);
        }
        return v;
    }

    std::optional<Matrix> matrix(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty()) {
            fail(path, "expected a non-empty array of rows");
            return std::nullopt;
        }
        const int rows = static_cast<int>(j.size());
        std::optional<Vec> first = number_array(j[0], path + "[0]");
        if (!first)
            return std::nullopt;
        const int cols = static_cast<int>(first->size());
        Matrix m(rows, cols);
        for (int c = 0; c < cols; ++c)
            m(0, c) = (*first)[c];
        for (int r = 1; r < rows; ++r) {
            auto row = number_array(j[r], path + "[" + std::to_string(r) + "]");
            if (!row)
                return std::nullopt;
            if (static_cast<int>(row->size()) != cols) {
                fail(path, "ragged matrix rows");
                return std::nullopt;
            }
            for (int c = 0; c < cols; ++c)
                m(r, c) = (*row)[c];
        }
        return m;
    }

private:
    std::vector<std::string>& errors_;
};

inline std::optional<JointMode> joint_mode_from_string(const std::string& s) {
    if (s == "strong")
        return JointMode::Strong;
    if (s == "leader")
        return JointMode::Leader;
    if (s == "connected-undirected" || s == "connected_undirected")
        return JointMode::ConnectedUndirected;
    return std::nullopt;
}

inline const char* joint_mode_name(JointMode m) {
    switch (m) {
        case JointMode::Strong: return "strong";
        case JointMode::Leader: return "leader";
        case JointMode::ConnectedUndirected: return "connected-undirected";
    }
    return "unknown";
}

}  // namespace detail

inline ScenarioParseResult parse_scenario_json(const json& root) {
    ScenarioParseResult result;
    detail::JsonReader r(result.errors);
    Scenario sc;

    if (!r.check_object(root, "$",
                        {"name", "description", "network", "dynamics", "lyapunov", "signal",
                         "leader", "initial_states", "integration", "monitors"},
                        {"network", "dynamics", "signal", "initial_states", "integration"}))
        return result;

    if (root.contains("name"))
        if (auto s = r.string(root["name"], "$.name"))
            sc.name = *s;

    // --- network ---
    {
        const json& net = root["network"];
        if (!r.check_object(net, "$.network",
                            {"agents", "dimension", "weight_band", "dwell_time", "window",
                             "leader_weight_floor"},
                            {"agents", "dimension", "weight_band", "dwell_time"}))
            return result;
        if (auto v = r.integer(net["agents"], "$.network.agents")) {
            if (*v < 1)
                r.fail("$.network.agents", "must be >= 1");
            else
                sc.num_agents = *v;
        }
        if (auto v = r.integer(net["dimension"], "$.network.dimension")) {
            if (*v < 1)
                r.fail("$.network.dimension", "must be >= 1");
            else
                sc.dimension = *v;
        }
        if (auto band = r.number_array(net["weight_band"], "$.network.weight_band")) {
            if (band->size() != 2 || !((*band)[0] > 0.0) || !((*band)[0] <= (*band)[1])) {
                r.fail("$.network.weight_band", "expected [a_lo, a_hi] with 0 < a_lo <= a_hi");
            } else {
                sc.a_lo = (*band)[0];
                sc.a_hi = (*band)[1];
            }
        }
        if (auto v = r.number(net["dwell_time"], "$.network.dwell_time")) {
            if (!(*v > 0.0))
                r.fail("$.network.dwell_time", "must be positive");
            else
                sc.tau_d = *v;
        }
        if (net.contains("window")) {
            if (auto v = r.number(net["window"], "$.network.window")) {
                if (!(*v > 0.0))
                    r.fail("$.network.window", "must be positive");
                else
                    sc.window = *v;
            }
        }
        if (net.contains("leader_weight_floor")) {
            if (auto v = r.number(net["leader_weight_floor"], "$.network.leader_weight_floor")) {
                if (!(*v > 0.0))
                    r.fail("$.network.leader_weight_floor", "must be positive");
                else
                    sc.b_lo = *v;
            }
        }
    }
    if (!result.errors.empty())
        return result;

    // --- dynamics ---
    {
        const json& dyn = root["dynamics"];
        if (!r.check_object(dyn, "$.dynamics",
                            {"type", "matrix", "rates", "lipschitz", "contractive", "amplitude",
                             "frequency", "phase"},
                            {"type"}))
            return result;
        const auto type = r.string(dyn["type"], "$.dynamics.type");
        if (!type)
            return result;
        const int n = sc.dimension;
        if (*type == "zero") {
            sc.dynamics = ZeroDynamics{n};
        } else if (*type == "linear") {
            if (!dyn.contains("matrix")) {
                r.fail("$.dynamics", "linear dynamics require 'matrix'");
                return result;
            }
            auto m = r.matrix(dyn["matrix"], "$.dynamics.matrix");
            if (!m)
                return result;
            if (m->rows() != n || m->cols() != n)
                r.fail("$.dynamics.matrix",
                       "must be " + std::to_string(n) + "x" + std::to_string(n) +
                           " to match $.network.dimension");
            else
                sc.dynamics = LinearDynamics{*m};
        } else if (*type == "skew_rotation") {
            if (!dyn.contains("rates")) {
                r.fail("$.dynamics", "skew_rotation dynamics require 'rates'");
                return result;
            }
            auto rates = r.number_array(dyn["rates"], "$.dynamics.rates");
            if (!rates)
                return result;
            const int covered = static_cast<int>(2 * rates->size());
            if (covered != n && covered + 1 != n)
                r.fail("$.dynamics.rates", "need one rate per planar block of $.network.dimension");
            else
                sc.dynamics = SkewRotationDynamics{n, *rates};
        } else if (*type == "saturated" || *type == "forced_saturated") {
            if (!dyn.contains("lipschitz")) {
                r.fail("$.dynamics", *type + " dynamics require 'lipschitz'");
                return result;
            }
            auto lf = r.number(dyn["lipschitz"], "$.dynamics.lipschitz");
            if (!lf)
                return result;
            if (!(*lf > 0.0)) {
                r.fail("$.dynamics.lipschitz", "must be positive");
                return result;
            }
            bool contractive = false;
            if (dyn.contains("contractive")) {
                if (!dyn["contractive"].is_boolean())
                    r.fail("$.dynamics.contractive", "expected a boolean");
                else
                    contractive = dyn["contractive"].get<bool>();
            }
            if (*type == "saturated") {
                sc.dynamics = SaturatedDynamics{n, *lf, contractive};
            } else {
                ForcedSaturatedDynamics fs{n, *lf, contractive, {}, 1.0, {}};
                if (!dyn.contains("amplitude") || !dyn.contains("frequency") ||
                    !dyn.contains("phase")) {
                    r.fail("$.dynamics", "forced_saturated requires amplitude, frequency, phase");
                    return result;
                }
                if (auto a = r.number_array(dyn["amplitude"], "$.dynamics.amplitude"))
                    fs.amplitude = *a;
                if (auto f = r.number(dyn["frequency"], "$.dynamics.frequency"))
                    fs.frequency = *f;
                if (auto ph = r.number_array(dyn["phase"], "$.dynamics.phase"))
                    fs.phase = *ph;
                if (static_cast<int>(fs.amplitude.size()) != n ||
                    static_cast<int>(fs.phase.size()) != n)
                    r.fail("$.dynamics", "amplitude/phase must have $.network.dimension entries");
                else
                    sc.dynamics = fs;
            }
        } else {
            r.fail("$.dynamics.type", "unknown dynamics type '" + *type + "'");
            return result;
        }
    }

    // --- lyapunov (optional) ---
    if (root.contains("lyapunov")) {
        const json& ly = root["lyapunov"];
        if (r.check_object(ly, "$.lyapunov", {"P"}, {"P"})) {
            if (auto m = r.matrix(ly["P"], "$.lyapunov.P")) {
                if (m->rows() != sc.dimension || m->cols() != sc.dimension) {
                    r.fail("$.lyapunov.P", "must be " + std::to_string(sc.dimension) + "x" +
                                               std::to_string(sc.dimension) +
                                               " to match $.network.dimension");
                } else {
                    try {
                        sc.lyapunov.emplace(*m);
                    } catch (const std::invalid_argument& e) {
                        r.fail("$.lyapunov.P", e.what());
                    }
                }
            }
        }
    }

    // --- leader (optional) ---
    if (root.contains("leader")) {
        const json& ld = root["leader"];
        if (r.check_object(ld, "$.leader", {"initial_state"}, {"initial_state"})) {
            if (auto y = r.number_array(ld["initial_state"], "$.leader.initial_state")) {
                if (static_cast<int>(y->size()) != sc.dimension)
                    r.fail("$.leader.initial_state", "dimension mismatch with $.network.dimension");
                else
                    sc.leader_initial = *y;
            }
        }
    }

    // --- signal ---
    {
        const json& sig = root["signal"];
        if (!r.check_object(sig, "$.signal", {"extension", "start_time", "segments"},
                            {"extension", "segments"}))
            return result;
        Extension ext = Extension::HoldLast;
        if (auto s = r.string(sig["extension"], "$.signal.extension")) {
            if (*s == "hold_last")
                ext = Extension::HoldLast;
            else if (*s == "periodic")
                ext = Extension::Periodic;
            else
                r.fail("$.signal.extension", "expected 'hold_last' or 'periodic'");
        }
        double start_time = 0.0;
        if (sig.contains("start_time"))
            if (auto v = r.number(sig["start_time"], "$.signal.start_time"))
                start_time = *v;

        std::vector<Segment> segments;
        if (!sig["segments"].is_array() || sig["segments"].empty()) {
            r.fail("$.signal.segments", "expected a non-empty array");
            return result;
        }
        for (std::size_t k = 0; k < sig["segments"].size(); ++k) {
            const std::string path = "$.signal.segments[" + std::to_string(k) + "]";
            const json& seg = sig["segments"][k];
            if (!r.check_object(seg, path, {"duration", "edges", "leader_edges"}, {"duration"}))
                continue;
            double duration = 0.0;
            if (auto v = r.number(seg["duration"], path + ".duration")) {
                if (!(*v > 0.0))
                    r.fail(path + ".duration", "must be positive");
                else
                    duration = *v;
            }
            WeightedDigraph g(sc.num_agents);
            if (seg.contains("edges")) {
                const json& edges = seg["edges"];
                if (!edges.is_array()) {
                    r.fail(path + ".edges", "expected an array of [source, target, weight]");
                    continue;
                }
                for (std::size_t e = 0; e < edges.size(); ++e) {
                    const std::string epath = path + ".edges[" + std::to_string(e) + "]";
                    const json& je = edges[e];
                    if (!je.is_array() || je.size() != 3 || !je[0].is_number_integer() ||
                        !je[1].is_number_integer() || !je[2].is_number()) {
                        r.fail(epath, "expected [source, target, weight] with 1-based agents");
                        continue;
                    }
                    const int src = je[0].get<int>();
                    const int tgt = je[1].get<int>();
                    const double w = je[2].get<double>();
                    if (src < 1 || src > sc.num_agents || tgt < 1 || tgt > sc.num_agents) {
                        r.fail(epath, "agent index out of range 1.." + std::to_string(sc.num_agents));
                        continue;
                    }
                    try {
                        g.add_edge(src - 1, tgt - 1, w);
                    } catch (const std::invalid_argument& ex) {
                        r.fail(epath, ex.what());
                    }
                }
            }
            if (seg.contains("leader_edges")) {
                if (!sc.leader_initial && !root.contains("leader"))
                    r.fail(path + ".leader_edges", "requires a $.leader block");
                LeaderGraph lg(std::move(g));
                const json& ledges = seg["leader_edges"];
                if (!ledges.is_array()) {
                    r.fail(path + ".leader_edges", "expected an array of [target, weight]");
                    continue;
                }
                for (std::size_t e = 0; e < ledges.size(); ++e) {
                    const std::string epath = path + ".leader_edges[" + std::to_string(e) + "]";
                    const json& je = ledges[e];
                    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
                        !je[1].is_number()) {
                        r.fail(epath, "expected [target, weight] with 1-based target");
                        continue;
                    }
                    const int tgt = je[0].get<int>();
                    const double w = je[1].get<double>();
                    if (tgt < 1 || tgt > sc.num_agents) {
                        r.fail(epath, "agent index out of range 1.." + std::to_string(sc.num_agents));
                        continue;
                    }
                    try {
                        lg.add_leader_edge(tgt - 1, w);
                    } catch (const std::invalid_argument& ex) {
                        r.fail(epath, ex.what());
                    }
                }
                if (duration > 0.0)
                    segments.push_back({std::move(lg), duration});
            } else if (duration > 0.0) {
                segments.push_back({std::move(g), duration});
            }
        }
        if (!result.errors.empty())
            return result;
        sc.signal = SwitchingSignal(std::move(segments), start_time, ext);
    }

    // --- initial states ---
    {
        const json& init = root["initial_states"];
        if (!init.is_array() || static_cast<int>(init.size()) != sc.num_agents) {
            r.fail("$.initial_states",
                   "expected " + std::to_string(sc.num_agents) + " state vectors");
        } else {
            for (std::size_t i = 0; i < init.size(); ++i) {
                const std::string path = "$.initial_states[" + std::to_string(i) + "]";
                if (auto row = r.number_array(init[i], path)) {
                    if (static_cast<int>(row->size()) != sc.dimension)
                        r.fail(path, "dimension mismatch with $.network.dimension");
                    else
                        sc.initial_states.push_back(*row);
                }
            }
        }
    }

    // --- integration ---
    {
        const json& integ = root["integration"];
        if (r.check_object(integ, "$.integration", {"step", "t_end", "output_stride"},
                           {"step", "t_end"})) {
            if (auto v = r.number(integ["step"], "$.integration.step")) {
                if (!(*v > 0.0))
                    r.fail("$.integration.step", "must be positive");
                else
                    sc.step = *v;
            }
            if (auto v = r.number(integ["t_end"], "$.integration.t_end")) {
                if (!(*v > sc.signal.start_time()))
                    r.fail("$.integration.t_end", "must exceed $.signal.start_time");
                else
                    sc.t_end = *v;
            }
            if (integ.contains("output_stride")) {
                if (auto v = r.integer(integ["output_stride"], "$.integration.output_stride")) {
                    if (*v < 1)
                        r.fail("$.integration.output_stride", "must be >= 1");
                    else
                        sc.output_stride = *v;
                }
            }
        }
    }

    // --- monitors ---
    const bool metrics_defaulted = !root.contains("monitors") || !root["monitors"].contains("metrics");
    if (root.contains("monitors")) {
        const json& mon = root["monitors"];
        if (r.check_object(mon, "$.monitors", {"metrics", "phi_sync", "connectivity"}, {})) {
            if (mon.contains("metrics")) {
                if (!mon["metrics"].is_array()) {
                    r.fail("$.monitors.metrics", "expected an array of metric names");
                } else {
                    for (std::size_t i = 0; i < mon["metrics"].size(); ++i) {
                        const std::string path = "$.monitors.metrics[" + std::to_string(i) + "]";
                        if (auto s = r.string(mon["metrics"][i], path)) {
                            const auto& known = known_metric_names();
                            if (std::find(known.begin(), known.end(), *s) == known.end())
                                r.fail(path, "unknown metric '" + *s + "'");
                            else
                                sc.monitors.metrics.push_back(*s);
                        }
                    }
                }
            }
            if (mon.contains("phi_sync")) {
                const json& ps = mon["phi_sync"];
                if (r.check_object(ps, "$.monitors.phi_sync", {"eps", "window"}, {"eps", "window"})) {
                    PhiSyncConfig cfgp;
                    if (auto v = r.number(ps["eps"], "$.monitors.phi_sync.eps"))
                        cfgp.eps = *v;
                    if (auto v = r.number(ps["window"], "$.monitors.phi_sync.window"))
                        cfgp.window = *v;
                    if (!(cfgp.eps > 0.0) || !(cfgp.window > 0.0))
                        r.fail("$.monitors.phi_sync", "eps and window must be positive");
                    else
                        sc.monitors.phi_sync = cfgp;
                }
            }
            if (mon.contains("connectivity")) {
                const json& cn = mon["connectivity"];
                if (r.check_object(cn, "$.monitors.connectivity", {"mode", "window"}, {"mode"})) {
                    ConnectivityRequirement req;
                    if (auto s = r.string(cn["mode"], "$.monitors.connectivity.mode")) {
                        if (auto m = detail::joint_mode_from_string(*s))
                            req.mode = *m;
                        else
                            r.fail("$.monitors.connectivity.mode",
                                   "expected strong, leader or connected-undirected");
                    }
                    if (cn.contains("window")) {
                        if (auto v = r.number(cn["window"], "$.monitors.connectivity.window")) {
                            if (!(*v > 0.0))
                                r.fail("$.monitors.connectivity.window", "must be positive");
                            else
                                req.window = *v;
                        }
                    }
                    sc.monitors.connectivity = req;
                }
            }
        }
    }
    if (metrics_defaulted) {
        sc.monitors.metrics.push_back("disagreement");
        if (sc.lyapunov)
            sc.monitors.metrics.push_back("max_phi");
        sc.monitors.metrics.push_back("lipschitz_v");
        if (sc.leader_initial)
            sc.monitors.metrics.push_back("leader_error");
    }

    // cross-checks that need the assembled pieces
    if (result.errors.empty()) {
        for (const std::string& m : sc.monitors.metrics) {
            if (m == "max_phi" && !sc.lyapunov)
                r.fail("$.monitors.metrics", "max_phi requires a $.lyapunov block");
            if (m == "leader_error" && !sc.leader_initial)
                r.fail("$.monitors.metrics", "leader_error requires a $.leader block");
        }
        if (sc.monitors.phi_sync && !sc.lyapunov)
            r.fail("$.monitors.phi_sync", "requires a $.lyapunov block");
        if (sc.signal.has_leader() && !sc.leader_initial)
            r.fail("$.signal", "leader edges present but no $.leader block");
        for (const ValidationIssue& issue : validate_signal(sc.signal, sc.tau_d, sc.a_lo, sc.a_hi, sc.b_lo))
            r.fail("$.signal", issue.message);
    }

    if (!result.errors.empty())
        return result;
    result.scenario = std::move(sc);
    return result;
}

inline ScenarioParseResult parse_scenario_text(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) {
        ScenarioParseResult result;
        result.errors.push_back("$: not valid JSON");
        return result;
    }
    return parse_scenario_json(root);
}

inline ScenarioParseResult parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ScenarioParseResult result;
        result.errors.push_back("$: cannot open scenario file '" + path + "'");
        return result;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

inline json Scenario::canonical_json() const {
    json root;
    json net;
    net["agents"] = num_agents;
    net["dimension"] = dimension;
    net["weight_band"] = {a_lo, a_hi};
    net["dwell_time"] = tau_d;
    if (window)
        net["window"] = *window;
    if (b_lo)
        net["leader_weight_floor"] = *b_lo;
    root["network"] = net;

    json dyn;
    if (std::holds_alternative<ZeroDynamics>(dynamics)) {
        dyn["type"] = "zero";
    } else if (const auto* lin = std::get_if<LinearDynamics>(&dynamics)) {
        dyn["type"] = "linear";
        json rows = json::array();
        for (int i = 0; i < lin->a.rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < lin->a.cols(); ++j)
                row.push_back(lin->a(i, j));
            rows.push_back(row);
        }
        dyn["matrix"] = rows;
    } else if (const auto* rot = std::get_if<SkewRotationDynamics>(&dynamics)) {
        dyn["type"] = "skew_rotation";
        dyn["rates"] = rot->rates;
    } else if (const auto* sat = std::get_if<SaturatedDynamics>(&dynamics)) {
        dyn["type"] = "saturated";
        dyn["lipschitz"] = sat->lipschitz;
        dyn["contractive"] = sat->contractive;
    } else if (const auto* fs = std::get_if<ForcedSaturatedDynamics>(&dynamics)) {
        dyn["type"] = "forced_saturated";
        dyn["lipschitz"] = fs->lipschitz;
        dyn["contractive"] = fs->contractive;
        dyn["amplitude"] = fs->amplitude;
        dyn["frequency"] = fs->frequency;
        dyn["phase"] = fs->phase;
    }
    root["dynamics"] = dyn;

    if (lyapunov) {
        json rows = json::array();
        for (int i = 0; i < lyapunov->p().rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < lyapunov->p().cols(); ++j)
                row.push_back(lyapunov->p()(i, j));
            rows.push_back(row);
        }
        root["lyapunov"] = {{"P", rows}};
    }

    json sig;
    sig["extension"] = signal.extension() == Extension::Periodic ? "periodic" : "hold_last";
    sig["start_time"] = signal.start_time();
    json segs = json::array();
    for (const Segment& s : signal.segments()) {
        json seg;
        seg["duration"] = s.duration;
        json edges = json::array();
        for (const Edge& e : follower_part(s.graph).edges())
            edges.push_back({e.source + 1, e.target + 1, e.weight});
        seg["edges"] = edges;
        if (const auto* lg = std::get_if<LeaderGraph>(&s.graph)) {
            json ledges = json::array();
            for (const LeaderEdge& e : lg->leader_edges())
                ledges.push_back({e.target + 1, e.weight});
            seg["leader_edges"] = ledges;
        }
        segs.push_back(seg);
    }
    sig["segments"] = segs;
    root["signal"] = sig;

    if (leader_initial)
        root["leader"] = {{"initial_state", *leader_initial}};
    root["initial_states"] = initial_states;
    root["integration"] = {{"step", step}, {"t_end", t_end}, {"output_stride", output_stride}};

    json mon;
    mon["metrics"] = monitors.metrics;
    if (monitors.phi_sync)
        mon["phi_sync"] = {{"eps", monitors.phi_sync->eps}, {"window", monitors.phi_sync->window}};
    if (monitors.connectivity) {
        json cn;
        cn["mode"] = detail::joint_mode_name(monitors.connectivity->mode);
        if (monitors.connectivity->window)
            cn["window"] = *monitors.connectivity->window;
        mon["connectivity"] = cn;
    }
    root["monitors"] = mon;
    return root;
}

inline std::uint64_t Scenario::fingerprint() const {
    return detail::fnv1a64(canonical_json().dump());
}

}  // namespace syncnet
