#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "syncnet/certificates.hpp"
#include "syncnet/csv.hpp"
#include "syncnet/metrics.hpp"
#include "syncnet/sampling.hpp"
#include "syncnet/scenario.hpp"

namespace syncnet::cli {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitViolated = 2;
constexpr int kExitNotApplicable = 3;
constexpr int kExitUsage = 64;

namespace detail {

inline std::string fingerprint_hex(std::uint64_t fp) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << fp;
    return os.str();
}

inline void print_certificate(std::ostream& out, const Certificate& cert) {
    out << "== " << cert.provenance << " ==\n";
    std::size_t width = 0;
    for (const auto& [key, value] : cert.constants)
        width = std::max(width, key.size());
    for (const auto& [key, value] : cert.constants)
        out << "  " << key << std::string(width - key.size() + 2, ' ') << format_double(value)
            << "\n";
    for (const std::string& note : cert.notes)
        out << "  note: " << note << "\n";
    out << "  verdict: " << to_string(cert.verdict) << "\n";
}

inline json certificate_json(const Certificate& cert) {
    json j;
    j["provenance"] = cert.provenance;
    j["verdict"] = to_string(cert.verdict);
    json constants;
    for (const auto& [key, value] : cert.constants)
        constants[key] = value;
    j["constants"] = constants;
    if (!cert.notes.empty())
        j["notes"] = cert.notes;
    return j;
}

/// Metric columns in the scenario's declared order. For leader runs max_phi monitors
/// the relative coordinate x_i - y.
inline std::vector<CsvColumn> metric_columns(const Scenario& sc, const Trajectory& traj) {
    std::vector<CsvColumn> cols;
    for (const std::string& name : sc.monitors.metrics) {
        if (name == "disagreement") {
            cols.push_back({name, disagreement_series(traj).values});
        } else if (name == "max_phi") {
            const TimeSeries s = traj.has_leader() ? max_relative_phi_series(traj, *sc.lyapunov)
                                                   : max_phi_series(traj, *sc.lyapunov);
            cols.push_back({name, s.values});
        } else if (name == "lipschitz_v") {
            cols.push_back({name, lipschitz_v_series(traj, lipschitz_constant(sc.dynamics)).values});
        } else if (name == "leader_error") {
            cols.push_back({name, leader_error_series(traj).values});
        }
    }
    return cols;
}

inline void write_manifest(std::ostream& out, const Scenario& sc, const Trajectory& traj) {
    out << "scenario = " << (sc.name.empty() ? "(unnamed)" : sc.name) << "\n";
    out << "fingerprint = " << fingerprint_hex(sc.fingerprint()) << "\n";
    out << "step = " << format_double(sc.step) << "\n";
    out << "t_end = " << format_double(sc.t_end) << "\n";
    out << "output_stride = " << sc.output_stride << "\n";
    out << "samples = " << traj.size() << "\n";
    out << "lipschitz_constant = " << format_double(lipschitz_constant(sc.dynamics)) << "\n";

    if (sc.lyapunov) {
        const std::uint64_t seed = seed_from_env();
        const auto samples = make_state_samples(seed, 200, sc.dimension);
        const auto absolute =
            check_dissipation(*sc.lyapunov, sc.dynamics, samples, /*relative=*/false);
        const auto relative =
            check_dissipation(*sc.lyapunov, sc.dynamics, samples, /*relative=*/true);
        out << "dissipation_check = "
            << (absolute.empty() ? "ok" : std::to_string(absolute.size()) + " violations")
            << " (200 samples, seed " << seed << ")\n";
        out << "relative_dissipation_check = "
            << (relative.empty() ? "ok" : std::to_string(relative.size()) + " violations")
            << " (200 samples, seed " << seed << ")\n";
    }

    if (auto params = sc.network_params()) {
        const Certificate cert = leaderless_lipschitz_certificate(*params);
        out << "certificate.leaderless = " << to_string(cert.verdict);
        if (cert.has("rho_star"))
            out << " (rho_star " << format_double(cert.at("rho_star")) << ", L "
                << format_double(*params->lipschitz) << ")";
        out << "\n";
        if (params->b_lo && sc.has_leader()) {
            const Certificate lf = leader_follower_certificate(*params);
            out << "certificate.leader_follower = " << to_string(lf.verdict);
            if (lf.has("rho_hat_star"))
                out << " (rho_hat_star " << format_double(lf.at("rho_hat_star")) << ")";
            out << "\n";
        }
    } else {
        out << "certificate.leaderless = not computed (declare network.window)\n";
    }

    if (sc.monitors.phi_sync && sc.lyapunov && !traj.has_leader()) {
        try {
            const auto d_star =
                detect_phi_sync(traj, *sc.lyapunov, sc.monitors.phi_sync->eps,
                                sc.monitors.phi_sync->window);
            if (d_star)
                out << "phi_sync = detected, d_star = " << format_double(*d_star) << "\n";
            else
                out << "phi_sync = not detected\n";
        } catch (const std::invalid_argument& e) {
            out << "phi_sync = n/a (" << e.what() << ")\n";
        }
    }
}

inline int report_parse_errors(const ScenarioParseResult& parsed, std::ostream& err) {
    err << "scenario validation failed:\n";
    for (const std::string& e : parsed.errors)
        err << "  " << e << "\n";
    return kExitUsage;
}

struct RunArtifacts {
    Trajectory trajectory;
    double final_error = 0.0;       // disagreement, or leader error for leader runs
    std::string envelope_verdict = "n/a";
    std::string certificate_verdict = "n/a";
};

/// Simulates one scenario and writes trajectory.csv + manifest.txt into dir.
inline RunArtifacts run_scenario_into(const Scenario& sc, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    RunArtifacts art;
    art.trajectory = simulate(sc.to_simulation_config());

    const auto cols = metric_columns(sc, art.trajectory);
    std::ofstream csv(dir / "trajectory.csv");
    write_trajectory_csv(csv, art.trajectory, cols);

    std::ofstream manifest(dir / "manifest.txt");
    write_manifest(manifest, sc, art.trajectory);

    const Trajectory& traj = art.trajectory;
    const TimeSeries err_series =
        traj.has_leader() ? leader_error_series(traj) : disagreement_series(traj);
    art.final_error = err_series.values.back();

    if (auto params = sc.network_params()) {
        const Certificate cert = (sc.has_leader() && params->b_lo)
                                     ? leader_follower_certificate(*params)
                                     : leaderless_lipschitz_certificate(*params);
        art.certificate_verdict = to_string(cert.verdict);
        if (cert.verdict == Verdict::Satisfied) {
            const auto env = check_exponential_envelope(err_series, traj.time(0),
                                                        cert.at("gamma"), cert.at("lambda"), 1e-6);
            art.envelope_verdict = env.ok ? "true" : "false";
        }
    }
    return art;
}

}  // namespace detail

inline int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                        std::optional<double> step_override, std::optional<double> t_end_override,
                        std::ostream& out, std::ostream& err) {
    ScenarioParseResult parsed = parse_scenario(scenario_path);
    if (!parsed.ok())
        return detail::report_parse_errors(parsed, err);
    Scenario sc = std::move(*parsed.scenario);
    if (step_override) {
        if (!(*step_override > 0.0)) {
            err << "--h must be positive\n";
            return kExitUsage;
        }
        sc.step = *step_override;
    }
    if (t_end_override) {
        if (!(*t_end_override > sc.signal.start_time())) {
            err << "--t-end must exceed the signal start time\n";
            return kExitUsage;
        }
        sc.t_end = *t_end_override;
    }

    try {
        const auto art = detail::run_scenario_into(sc, out_dir);
        out << "wrote " << (std::filesystem::path(out_dir) / "trajectory.csv").string() << " ("
            << art.trajectory.size() << " samples)\n";
        out << "fingerprint " << detail::fingerprint_hex(sc.fingerprint()) << "\n";
        return kExitOk;
    } catch (const std::runtime_error& e) {
        err << e.what() << "\n";
        return kExitRuntime;
    }
}

struct CertifyArgs {
    std::optional<std::string> scenario;
    std::optional<int> agents;
    std::optional<double> a_lo;
    std::optional<double> a_hi;
    std::optional<double> tau_d;
    std::optional<double> window;
    std::optional<double> lipschitz;
    std::optional<double> b_lo;
};

inline int cmd_certify(const CertifyArgs& args, std::ostream& out, std::ostream& err) {
    NetworkParams params;
    bool have_base = false;
    if (args.scenario) {
        ScenarioParseResult parsed = parse_scenario(*args.scenario);
        if (!parsed.ok())
            return detail::report_parse_errors(parsed, err);
        const Scenario& sc = *parsed.scenario;
        if (sc.num_agents < 2) {
            err << "certify: scenario needs at least two agents\n";
            return kExitUsage;
        }
        params.num_agents = sc.num_agents;
        params.a_lo = sc.a_lo;
        params.a_hi = sc.a_hi;
        params.tau_d = sc.tau_d;
        if (sc.window)
            params.window_T = *sc.window;
        else if (!args.window) {
            err << "certify: scenario declares no network.window; pass --window\n";
            return kExitUsage;
        }
        params.b_lo = sc.b_lo;
        params.lipschitz = lipschitz_constant(sc.dynamics);
        have_base = true;
    }
    if (args.agents)
        params.num_agents = *args.agents;
    if (args.a_lo)
        params.a_lo = *args.a_lo;
    if (args.a_hi)
        params.a_hi = *args.a_hi;
    if (args.tau_d)
        params.tau_d = *args.tau_d;
    if (args.window)
        params.window_T = *args.window;
    if (args.lipschitz)
        params.lipschitz = *args.lipschitz;
    if (args.b_lo)
        params.b_lo = *args.b_lo;

    if (!have_base && !(args.agents && args.a_lo && args.a_hi && args.tau_d && args.window)) {
        err << "certify: need --scenario or all of --agents --a-lo --a-hi --tau-d --window\n";
        return kExitUsage;
    }
    if (!params.lipschitz) {
        err << "certify: missing Lipschitz constant (--lipschitz)\n";
        return kExitUsage;
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        err << "certify: " << e.what() << "\n";
        return kExitUsage;
    }

    json bundle;
    const Certificate diag = nonexpansive_contraction_factors(params);
    detail::print_certificate(out, diag);
    bundle["nonexpansive_diagnostics"] = detail::certificate_json(diag);

    std::vector<Verdict> requested;
    const Certificate leaderless = leaderless_lipschitz_certificate(params);
    detail::print_certificate(out, leaderless);
    bundle["leaderless"] = detail::certificate_json(leaderless);
    requested.push_back(leaderless.verdict);

    if (params.b_lo) {
        const Certificate lf = leader_follower_certificate(params);
        detail::print_certificate(out, lf);
        bundle["leader_follower"] = detail::certificate_json(lf);
        requested.push_back(lf.verdict);
    }

    out << bundle.dump() << "\n";

    if (std::any_of(requested.begin(), requested.end(),
                    [](Verdict v) { return v == Verdict::Violated; }))
        return kExitViolated;
    if (std::any_of(requested.begin(), requested.end(),
                    [](Verdict v) { return v == Verdict::NotApplicable; }))
        return kExitNotApplicable;
    return kExitOk;
}

inline int cmd_check_graph(const std::string& scenario_path, std::optional<double> window_flag,
                           const std::string& mode_flag, std::ostream& out, std::ostream& err) {
    ScenarioParseResult parsed = parse_scenario(scenario_path);
    if (!parsed.ok())
        return detail::report_parse_errors(parsed, err);
    const Scenario& sc = *parsed.scenario;
    const SwitchingSignal& signal = sc.signal;
    const bool leader_signal = signal.has_leader();

    std::optional<JointMode> required_mode;
    if (!mode_flag.empty()) {
        required_mode = syncnet::detail::joint_mode_from_string(mode_flag);
        if (!required_mode) {
            err << "check-graph: unknown --mode '" << mode_flag << "'\n";
            return kExitUsage;
        }
    } else if (sc.monitors.connectivity) {
        required_mode = sc.monitors.connectivity->mode;
    } else {
        required_mode = leader_signal ? JointMode::Leader : JointMode::Strong;
    }

    std::optional<double> window = window_flag;
    if (!window && sc.monitors.connectivity && sc.monitors.connectivity->window)
        window = sc.monitors.connectivity->window;
    if (!window)
        window = sc.window;

    // informational report over the classes that make sense for this signal
    auto yes_no = [](bool b) { return b ? "yes" : "no"; };
    if (window) {
        const JointMode m = leader_signal ? JointMode::Leader : JointMode::Strong;
        const bool ok = check_uniform_joint_connectivity(signal, *window, m);
        out << (leader_signal ? "uniformly jointly leader connected" : "uniformly jointly strongly connected")
            << " (T=" << format_double(*window) << "): " << yes_no(ok) << "\n";
    } else {
        out << "uniform joint connectivity: not checked (no window; pass --window or set network.window)\n";
    }
    if (leader_signal) {
        const bool ok = check_infinite_joint_connectivity(signal, JointMode::Leader);
        out << "infinitely jointly leader connected: " << yes_no(ok) << "\n";
    } else {
        try {
            const bool ok =
                check_infinite_joint_connectivity(signal, JointMode::ConnectedUndirected);
            out << "infinitely jointly connected (undirected): " << yes_no(ok) << "\n";
        } catch (const std::invalid_argument& e) {
            out << "infinitely jointly connected (undirected): n/a (" << e.what() << ")\n";
        }
    }

    // the verdict the exit code reports
    if (*required_mode == JointMode::ConnectedUndirected) {
        try {
            const bool ok = check_infinite_joint_connectivity(signal, JointMode::ConnectedUndirected);
            out << "required: connected-undirected -> " << yes_no(ok) << "\n";
            return ok ? kExitOk : kExitViolated;
        } catch (const std::invalid_argument& e) {
            err << "check-graph: " << e.what() << "\n";
            return kExitNotApplicable;
        }
    }
    if (!window) {
        err << "check-graph: the required class needs a window T (pass --window)\n";
        return kExitUsage;
    }
    const bool ok = check_uniform_joint_connectivity(signal, *window, *required_mode);
    out << "required: " << syncnet::detail::joint_mode_name(*required_mode)
        << " (T=" << format_double(*window) << ") -> " << yes_no(ok) << "\n";
    return ok ? kExitOk : kExitViolated;
}

namespace detail {

inline SwitchingSignal scale_signal_weights(const SwitchingSignal& signal, double factor) {
    std::vector<Segment> segments;
    segments.reserve(signal.segments().size());
    for (const Segment& s : signal.segments()) {
        const WeightedDigraph& f = follower_part(s.graph);
        WeightedDigraph scaled(f.num_agents());
        for (const Edge& e : f.edges())
            scaled.add_edge(e.source, e.target, e.weight * factor);
        if (const auto* lg = std::get_if<LeaderGraph>(&s.graph)) {
            LeaderGraph slg(std::move(scaled));
            for (const LeaderEdge& e : lg->leader_edges())
                slg.add_leader_edge(e.target, e.weight * factor);
            segments.push_back({std::move(slg), s.duration});
        } else {
            segments.push_back({std::move(scaled), s.duration});
        }
    }
    return SwitchingSignal(std::move(segments), signal.start_time(), signal.extension());
}

}  // namespace detail

inline int cmd_sweep(const std::string& scenario_path, const std::string& param,
                     const std::vector<double>& values, const std::string& out_dir, int jobs,
                     std::ostream& out, std::ostream& err) {
    if (values.empty()) {
        err << "sweep: --values must not be empty\n";
        return kExitUsage;
    }
    static const std::vector<std::string> sweepable = {"L_f", "h", "t_end", "weight_scale"};
    if (std::find(sweepable.begin(), sweepable.end(), param) == sweepable.end()) {
        err << "sweep: unknown parameter '" << param << "' (expected L_f, h, t_end, weight_scale)\n";
        return kExitUsage;
    }
    ScenarioParseResult parsed = parse_scenario(scenario_path);
    if (!parsed.ok())
        return detail::report_parse_errors(parsed, err);
    const Scenario& base = *parsed.scenario;

    if (param == "L_f" && !std::holds_alternative<SaturatedDynamics>(base.dynamics) &&
        !std::holds_alternative<ForcedSaturatedDynamics>(base.dynamics)) {
        err << "sweep: L_f applies only to saturated dynamics\n";
        return kExitUsage;
    }

    std::vector<Scenario> variants;
    variants.reserve(values.size());
    for (double v : values) {
        Scenario sc = base;
        if (param == "L_f") {
            if (!(v > 0.0)) {
                err << "sweep: L_f values must be positive\n";
                return kExitUsage;
            }
            if (auto* sat = std::get_if<SaturatedDynamics>(&sc.dynamics))
                sat->lipschitz = v;
            else if (auto* fs = std::get_if<ForcedSaturatedDynamics>(&sc.dynamics))
                fs->lipschitz = v;
        } else if (param == "h") {
            if (!(v > 0.0)) {
                err << "sweep: h values must be positive\n";
                return kExitUsage;
            }
            sc.step = v;
        } else if (param == "t_end") {
            if (!(v > sc.signal.start_time())) {
                err << "sweep: t_end values must exceed the signal start time\n";
                return kExitUsage;
            }
            sc.t_end = v;
        } else {  // weight_scale
            if (!(v > 0.0)) {
                err << "sweep: weight_scale values must be positive\n";
                return kExitUsage;
            }
            sc.signal = detail::scale_signal_weights(sc.signal, v);
            sc.a_lo *= v;
            sc.a_hi *= v;
            if (sc.b_lo)
                sc.b_lo = *sc.b_lo * v;
        }
        variants.push_back(std::move(sc));
    }

    struct Row {
        double value;
        detail::RunArtifacts art;
        std::string error;
    };
    std::vector<Row> rows(values.size());
    auto run_one = [&](std::size_t idx) {
        Row row;
        row.value = values[idx];
        std::ostringstream dir_name;
        dir_name << "run_" << std::setfill('0') << std::setw(3) << idx;
        try {
            row.art = detail::run_scenario_into(variants[idx],
                                                std::filesystem::path(out_dir) / dir_name.str());
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    };

    if (jobs > 1) {
        std::vector<std::future<Row>> futures;
        futures.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            futures.push_back(std::async(std::launch::async, run_one, i));
        for (std::size_t i = 0; i < values.size(); ++i)
            rows[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            rows[i] = run_one(i);
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream summary(std::filesystem::path(out_dir) / "summary.csv");
    summary << "value,final_disagreement,envelope_ok,certificate_verdict\n";
    bool any_failed = false;
    for (const Row& row : rows) {
        if (!row.error.empty()) {
            any_failed = true;
            summary << format_double(row.value) << ",error,error,error\n";
            err << "sweep value " << format_double(row.value) << ": " << row.error << "\n";
            continue;
        }
        summary << format_double(row.value) << "," << format_double(row.art.final_error) << ","
                << row.art.envelope_verdict << "," << row.art.certificate_verdict << "\n";
    }
    out << "wrote " << (std::filesystem::path(out_dir) / "summary.csv").string() << " ("
        << rows.size() << " rows)\n";
    return any_failed ? kExitRuntime : kExitOk;
}

/// Argument-vector entry point; args exclude the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"simulator and certificate engine for synchronization of coupled agents\n"
                 "under switching directed communication topologies"};
    app.name("syncnet");
    app.require_subcommand(0, 1);

    std::string scenario_path;
    std::string out_dir = "out";
    double step_override = 0.0;
    double t_end_override = 0.0;

    CLI::App* sim = app.add_subcommand("simulate", "integrate a scenario and write CSV output");
    sim->set_help_flag("--help", "print help");  // frees -h so --h can be the step override
    sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sim->add_option("--out", out_dir, "output directory");
    CLI::Option* sim_h = sim->add_option("--h", step_override, "integration step override");
    CLI::Option* sim_tend = sim->add_option("--t-end", t_end_override, "end time override");

    CertifyArgs cert_args;
    std::string cert_scenario;
    int cert_agents = 0;
    double cert_a_lo = 0, cert_a_hi = 0, cert_tau_d = 0, cert_window = 0, cert_lips = 0,
           cert_b_lo = 0;
    CLI::App* cert = app.add_subcommand("certify", "evaluate the closed-form certificates");
    CLI::Option* o_sc = cert->add_option("--scenario", cert_scenario, "scenario JSON file");
    CLI::Option* o_n = cert->add_option("--agents", cert_agents, "agent count N");
    CLI::Option* o_alo = cert->add_option("--a-lo", cert_a_lo, "weight band floor a_lo");
    CLI::Option* o_ahi = cert->add_option("--a-hi", cert_a_hi, "weight band ceiling a_hi");
    CLI::Option* o_tau = cert->add_option("--tau-d", cert_tau_d, "dwell time tau_D");
    CLI::Option* o_win = cert->add_option("--window", cert_window, "joint-connectivity window T");
    CLI::Option* o_lip = cert->add_option("--lipschitz", cert_lips, "global Lipschitz constant L");
    CLI::Option* o_blo = cert->add_option("--b-lo", cert_b_lo, "leader weight floor b_lo");

    std::string mode_flag;
    double window_flag = 0.0;
    CLI::App* chk = app.add_subcommand("check-graph", "decide the joint-connectivity classes");
    chk->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    CLI::Option* chk_win = chk->add_option("--window", window_flag, "window length T");
    chk->add_option("--mode", mode_flag, "required class: strong, leader or connected-undirected");

    std::string sweep_param;
    std::vector<double> sweep_values;
    int sweep_jobs = 1;
    CLI::App* swp = app.add_subcommand("sweep", "run a scenario across parameter values");
    swp->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    swp->add_option("--param", sweep_param, "L_f, h, t_end or weight_scale")->required();
    swp->add_option("--values", sweep_values, "comma-separated values")
        ->required()
        ->delimiter(',');
    swp->add_option("--out", out_dir, "output directory");
    swp->add_option("--jobs", sweep_jobs, "concurrent runs");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "syncnet: " << e.what() << "\n";
        return kExitUsage;
    }

    if (sim->parsed())
        return cmd_simulate(scenario_path, out_dir,
                            *sim_h ? std::optional<double>(step_override) : std::nullopt,
                            *sim_tend ? std::optional<double>(t_end_override) : std::nullopt, out,
                            err);
    if (cert->parsed()) {
        if (*o_sc)
            cert_args.scenario = cert_scenario;
        if (*o_n)
            cert_args.agents = cert_agents;
        if (*o_alo)
            cert_args.a_lo = cert_a_lo;
        if (*o_ahi)
            cert_args.a_hi = cert_a_hi;
        if (*o_tau)
            cert_args.tau_d = cert_tau_d;
        if (*o_win)
            cert_args.window = cert_window;
        if (*o_lip)
            cert_args.lipschitz = cert_lips;
        if (*o_blo)
            cert_args.b_lo = cert_b_lo;
        return cmd_certify(cert_args, out, err);
    }
    if (chk->parsed())
        return cmd_check_graph(scenario_path,
                               *chk_win ? std::optional<double>(window_flag) : std::nullopt,
                               mode_flag, out, err);
    if (swp->parsed())
        return cmd_sweep(scenario_path, sweep_param, sweep_values, out_dir, sweep_jobs, out, err);

    out << app.help();
    return kExitOk;
}

}  // namespace syncnet::cli
