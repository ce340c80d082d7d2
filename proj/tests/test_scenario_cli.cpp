#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "syncnet/cli.hpp"
#include "syncnet/csv.hpp"
#include "syncnet/scenario.hpp"
#include "test_support.hpp"

using namespace syncnet;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const char* kTwoAgentScenario = R"({
  "name": "two_agent_consensus",
  "network": {"agents": 2, "dimension": 1, "weight_band": [1.0, 1.0], "dwell_time": 1.0, "window": 1.0},
  "dynamics": {"type": "zero"},
  "lyapunov": {"P": [[1.0]]},
  "signal": {"extension": "periodic", "segments": [
    {"duration": 1.0, "edges": [[1, 2, 1.0], [2, 1, 1.0]]}
  ]},
  "initial_states": [[1.0], [-1.0]],
  "integration": {"step": 1e-3, "t_end": 1.0, "output_stride": 10}
})";

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("syncnet_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool errors_mention(const ScenarioParseResult& r, const std::string& needle) {
    for (const std::string& e : r.errors)
        if (e.find(needle) != std::string::npos)
            return true;
    return false;
}

}  // namespace

TEST_CASE("minimal scenario round-trips through the parser") {
    const auto parsed = parse_scenario_text(kTwoAgentScenario);
    REQUIRE(parsed.ok());
    CHECK(parsed.scenario->num_agents == 2);
    CHECK(parsed.scenario->dimension == 1);
    CHECK(parsed.scenario->window == 1.0);
    CHECK(parsed.scenario->monitors.metrics ==
          std::vector<std::string>{"disagreement", "max_phi", "lipschitz_v"});
}

TEST_CASE("dwell-time violations surface as scenario errors") {
    std::string text = kTwoAgentScenario;
    const auto pos = text.find("\"duration\": 1.0");
    text.replace(pos, 15, "\"duration\": 0.3");
    const auto parsed = parse_scenario_text(text);
    CHECK_FALSE(parsed.ok());
    CHECK(errors_mention(parsed, "dwell-time"));
}

TEST_CASE("a P matrix of the wrong size names both fields") {
    std::string text = kTwoAgentScenario;
    const auto pos = text.find("[[1.0]]");
    text.replace(pos, 7, "[[1.0, 0.0], [0.0, 1.0]]");
    const auto parsed = parse_scenario_text(text);
    CHECK_FALSE(parsed.ok());
    CHECK(errors_mention(parsed, "$.lyapunov.P"));
    CHECK(errors_mention(parsed, "$.network.dimension"));
}

TEST_CASE("unknown fields are named with their path") {
    std::string text = kTwoAgentScenario;
    const auto pos = text.find("\"dynamics\"");
    text.insert(pos, "\"typo_field\": 3, ");
    const auto parsed = parse_scenario_text(text);
    CHECK_FALSE(parsed.ok());
    CHECK(errors_mention(parsed, "typo_field"));
}

TEST_CASE("malformed JSON is reported rather than thrown") {
    const auto parsed = parse_scenario_text("{ not json");
    CHECK_FALSE(parsed.ok());
    CHECK(errors_mention(parsed, "not valid JSON"));
}

TEST_CASE("self-loops and duplicate edges are rejected with paths") {
    std::string text = kTwoAgentScenario;
    const auto pos = text.find("[[1, 2, 1.0], [2, 1, 1.0]]");
    text.replace(pos, 26, "[[1, 1, 1.0]]");
    const auto parsed = parse_scenario_text(text);
    CHECK_FALSE(parsed.ok());
    CHECK(errors_mention(parsed, "self-loop"));
}

TEST_CASE("fingerprint ignores formatting and naming but tracks semantics") {
    const auto base = parse_scenario_text(kTwoAgentScenario);
    REQUIRE(base.ok());
    const auto fp = base.scenario->fingerprint();

    // whitespace and key order are irrelevant
    std::string reordered = R"({
      "integration": {"t_end": 1.0, "output_stride": 10, "step": 1e-3},
      "initial_states": [[1.0], [-1.0]],
      "signal": {"segments": [{"edges": [[1, 2, 1.0], [2, 1, 1.0]], "duration": 1.0}], "extension": "periodic"},
      "lyapunov": {"P": [[1.0]]},
      "dynamics": {"type": "zero"},
      "network": {"dwell_time": 1.0, "window": 1.0, "weight_band": [1.0, 1.0], "dimension": 1, "agents": 2},
      "name": "renamed_cosmetically"
    })";
    const auto same = parse_scenario_text(reordered);
    REQUIRE(same.ok());
    CHECK(same.scenario->fingerprint() == fp);

    auto changed = *base.scenario;
    changed.step = 5e-4;
    CHECK(changed.fingerprint() != fp);
}

TEST_CASE("trajectory CSV is bit-exact under round-trip") {
    const auto traj = simulate(testsupport::two_agent_closed_form(1e-3, 1.0));
    std::ostringstream out;
    write_trajectory_csv(out, traj, {});
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x_1_1,x_2_1");
    std::string line;
    std::size_t k = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string field;
        std::getline(fields, field, ',');
        CHECK(std::strtod(field.c_str(), nullptr) == traj.time(k));
        std::getline(fields, field, ',');
        CHECK(std::strtod(field.c_str(), nullptr) == traj.states(k)[0]);
        std::getline(fields, field, ',');
        CHECK(std::strtod(field.c_str(), nullptr) == traj.states(k)[1]);
        ++k;
    }
    CHECK(k == traj.size());
}

TEST_CASE("simulate command writes trajectory, metrics and manifest") {
    const fs::path dir = temp_dir("simulate");
    const fs::path scenario = write_file(dir, "scenario.json", kTwoAgentScenario);
    std::ostringstream out, err;
    const int code = cli::cmd_simulate(scenario.string(), (dir / "run").string(), std::nullopt,
                                       std::nullopt, out, err);
    REQUIRE(code == cli::kExitOk);

    const std::string csv = slurp(dir / "run" / "trajectory.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,x_1_1,x_2_1,disagreement,max_phi,lipschitz_v");

    // last line holds t = 1; its disagreement column is the squared gap 4 e^{-4}
    std::string line, last;
    while (std::getline(lines, line))
        if (!line.empty())
            last = line;
    std::istringstream fields(last);
    std::string field;
    for (int i = 0; i < 4; ++i)
        std::getline(fields, field, ',');
    CHECK(std::strtod(field.c_str(), nullptr) == Approx(4.0 * std::exp(-4.0)).margin(1e-6));

    const std::string manifest = slurp(dir / "run" / "manifest.txt");
    CHECK(manifest.find("fingerprint = ") != std::string::npos);
    CHECK(manifest.find("dissipation_check = ok") != std::string::npos);
    CHECK(manifest.find("certificate.leaderless = satisfied") != std::string::npos);
}

TEST_CASE("disabling monitors strips the metric columns") {
    std::string text = kTwoAgentScenario;
    text.insert(text.rfind('}'), R"(, "monitors": {"metrics": []})");
    const fs::path dir = temp_dir("simulate_bare");
    const fs::path scenario = write_file(dir, "scenario.json", text);
    std::ostringstream out, err;
    REQUIRE(cli::cmd_simulate(scenario.string(), (dir / "run").string(), std::nullopt,
                              std::nullopt, out, err) == cli::kExitOk);
    std::istringstream lines(slurp(dir / "run" / "trajectory.csv"));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,x_1_1,x_2_1");
}

TEST_CASE("identical initial states keep the disagreement column at zero") {
    std::string text = kTwoAgentScenario;
    const auto pos = text.find("[[1.0], [-1.0]]");
    text.replace(pos, 15, "[[0.7], [0.7]]");
    const fs::path dir = temp_dir("simulate_manifold");
    const fs::path scenario = write_file(dir, "scenario.json", text);
    std::ostringstream out, err;
    REQUIRE(cli::cmd_simulate(scenario.string(), (dir / "run").string(), std::nullopt,
                              std::nullopt, out, err) == cli::kExitOk);
    std::istringstream lines(slurp(dir / "run" / "trajectory.csv"));
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string field;
        for (int i = 0; i < 4; ++i)
            std::getline(fields, field, ',');
        CHECK(std::strtod(field.c_str(), nullptr) <= 1e-12);
    }
}

TEST_CASE("certify exits by verdict") {
    std::ostringstream out, err;
    cli::CertifyArgs ok;
    ok.agents = 2;
    ok.a_lo = 1.0;
    ok.a_hi = 1.0;
    ok.tau_d = 1.0;
    ok.window = 1.0;
    ok.lipschitz = 1e-5;
    CHECK(cli::cmd_certify(ok, out, err) == cli::kExitOk);
    CHECK(out.str().find("verdict: satisfied") != std::string::npos);

    auto violated = ok;
    violated.lipschitz = 0.01;
    std::ostringstream out2, err2;
    CHECK(cli::cmd_certify(violated, out2, err2) == cli::kExitViolated);

    auto incomplete = ok;
    incomplete.lipschitz.reset();
    std::ostringstream out3, err3;
    CHECK(cli::cmd_certify(incomplete, out3, err3) == cli::kExitUsage);
}

TEST_CASE("certify prints machine-readable JSON on its last line") {
    std::ostringstream out, err;
    cli::CertifyArgs args;
    args.agents = 2;
    args.a_lo = 1.0;
    args.a_hi = 1.0;
    args.tau_d = 1.0;
    args.window = 1.0;
    args.lipschitz = 0.0;
    args.b_lo = 1.0;
    REQUIRE(cli::cmd_certify(args, out, err) == cli::kExitOk);
    std::istringstream lines(out.str());
    std::string line, last;
    while (std::getline(lines, line))
        if (!line.empty())
            last = line;
    const json j = json::parse(last);
    CHECK(j.contains("leaderless"));
    CHECK(j.contains("leader_follower"));
    CHECK(j["leaderless"]["constants"]["rho_star"].get<double>() == Approx(3.574e-4).epsilon(1e-3));
    CHECK(j["leader_follower"]["constants"]["rho_hat_star"].get<double>() ==
          Approx(5.62e-6).epsilon(1e-3));
}

TEST_CASE("check-graph confirms the alternating pair at the right window") {
    const std::string scenario_text = R"({
      "network": {"agents": 2, "dimension": 1, "weight_band": [1.0, 1.0], "dwell_time": 1.0},
      "dynamics": {"type": "zero"},
      "signal": {"extension": "periodic", "segments": [
        {"duration": 1.0, "edges": [[1, 2, 1.0]]},
        {"duration": 1.0, "edges": [[2, 1, 1.0]]}
      ]},
      "initial_states": [[1.0], [-1.0]],
      "integration": {"step": 1e-3, "t_end": 1.0}
    })";
    const fs::path dir = temp_dir("check_graph");
    const fs::path scenario = write_file(dir, "scenario.json", scenario_text);

    std::ostringstream out, err;
    CHECK(cli::cmd_check_graph(scenario.string(), 2.0, "strong", out, err) == cli::kExitOk);
    CHECK(out.str().find("uniformly jointly strongly connected (T=2): yes") != std::string::npos);

    std::ostringstream out2, err2;
    CHECK(cli::cmd_check_graph(scenario.string(), 1.0, "strong", out2, err2) ==
          cli::kExitViolated);

    std::ostringstream out3, err3;
    CHECK(cli::cmd_check_graph(scenario.string(), std::nullopt, "connected-undirected", out3,
                               err3) == cli::kExitNotApplicable);

    const fs::path undirected = fs::path(SYNCNET_SCENARIO_DIR) / "ijc_undirected.json";
    std::ostringstream out4, err4;
    CHECK(cli::cmd_check_graph(undirected.string(), std::nullopt, "", out4, err4) ==
          cli::kExitOk);
    CHECK(out4.str().find("required: connected-undirected -> yes") != std::string::npos);
}

TEST_CASE("sweeping the step reproduces the fourth-order error ratio in the summary") {
    const fs::path dir = temp_dir("sweep");
    const fs::path scenario = write_file(dir, "scenario.json", kTwoAgentScenario);
    std::ostringstream out, err;
    const int code = cli::cmd_sweep(scenario.string(), "h", {1e-3, 5e-4}, (dir / "out").string(),
                                    1, out, err);
    REQUIRE(code == cli::kExitOk);

    std::istringstream lines(slurp(dir / "out" / "summary.csv"));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "value,final_disagreement,envelope_ok,certificate_verdict");
    double final_err[2];
    for (int i = 0; i < 2; ++i) {
        std::string line;
        REQUIRE(std::getline(lines, line));
        std::istringstream fields(line);
        std::string field;
        std::getline(fields, field, ',');
        std::getline(fields, field, ',');
        const double exact = 4.0 * std::exp(-4.0);
        final_err[i] = std::fabs(std::strtod(field.c_str(), nullptr) - exact);
        std::getline(fields, field, ',');
        CHECK(field == "true");  // zero dynamics satisfy the certificate envelope
        std::getline(fields, field, ',');
        CHECK(field == "satisfied");
    }
    const double ratio = final_err[0] / final_err[1];
    CHECK(ratio > 12.8);
    CHECK(ratio < 19.2);
}

TEST_CASE("sweep rejects unknown parameters and empty value lists through the CLI") {
    const fs::path dir = temp_dir("sweep_usage");
    const fs::path scenario = write_file(dir, "scenario.json", kTwoAgentScenario);

    std::ostringstream out, err;
    CHECK(cli::cmd_sweep(scenario.string(), "nope", {1.0}, (dir / "o1").string(), 1, out, err) ==
          cli::kExitUsage);

    std::ostringstream out2, err2;
    CHECK(cli::cmd_sweep(scenario.string(), "h", {}, (dir / "o2").string(), 1, out2, err2) ==
          cli::kExitUsage);
}

TEST_CASE("sweep can run its scenarios concurrently") {
    const fs::path dir = temp_dir("sweep_jobs");
    const fs::path scenario = write_file(dir, "scenario.json", kTwoAgentScenario);
    std::ostringstream out, err;
    const int code = cli::cmd_sweep(scenario.string(), "t_end", {0.5, 1.0, 1.5, 2.0},
                                    (dir / "out").string(), 4, out, err);
    REQUIRE(code == cli::kExitOk);
    std::istringstream lines(slurp(dir / "out" / "summary.csv"));
    std::string line;
    std::getline(lines, line);  // header
    std::vector<double> values;
    while (std::getline(lines, line)) {
        if (line.empty())
            continue;
        values.push_back(std::strtod(line.c_str(), nullptr));
    }
    CHECK(values == std::vector<double>{0.5, 1.0, 1.5, 2.0});  // input order preserved
}

TEST_CASE("every shipped scenario file parses cleanly") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(SYNCNET_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json")
            continue;
        ++count;
        const auto parsed = parse_scenario(entry.path().string());
        INFO(entry.path().filename().string());
        for (const std::string& e : parsed.errors)
            INFO(e);
        CHECK(parsed.ok());
    }
    CHECK(count >= 5);
}

TEST_CASE("leader scenarios emit leader columns and the leader error metric") {
    const fs::path scenario = fs::path(SYNCNET_SCENARIO_DIR) / "leader_follower.json";
    const fs::path dir = temp_dir("leader_csv");
    std::ostringstream out, err;
    REQUIRE(cli::cmd_simulate(scenario.string(), (dir / "run").string(), std::nullopt, 2.0, out,
                              err) == cli::kExitOk);
    std::istringstream lines(slurp(dir / "run" / "trajectory.csv"));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,x_1_1,x_2_1,y_1,disagreement,max_phi,lipschitz_v,leader_error");
    const std::string manifest = slurp(dir / "run" / "manifest.txt");
    CHECK(manifest.find("certificate.leader_follower = satisfied") != std::string::npos);
}

TEST_CASE("a diverging linear scenario exits with a blow-up report") {
    const std::string text = R"({
      "network": {"agents": 2, "dimension": 1, "weight_band": [1.0, 1.0], "dwell_time": 1.0},
      "dynamics": {"type": "linear", "matrix": [[900.0]]},
      "signal": {"extension": "periodic", "segments": [
        {"duration": 1.0, "edges": [[1, 2, 1.0], [2, 1, 1.0]]}
      ]},
      "initial_states": [[1.0], [-1.0]],
      "integration": {"step": 1e-3, "t_end": 2.0}
    })";
    const fs::path dir = temp_dir("blow_up");
    const fs::path scenario = write_file(dir, "scenario.json", text);
    std::ostringstream out, err;
    const int code =
        cli::cmd_simulate(scenario.string(), (dir / "run").string(), std::nullopt, std::nullopt,
                          out, err);
    CHECK(code == cli::kExitRuntime);
    CHECK(err.str().find("blow-up") != std::string::npos);
}

TEST_CASE("step and horizon overrides flow through the run entry point") {
    const fs::path dir = temp_dir("overrides");
    const fs::path scenario = write_file(dir, "scenario.json", kTwoAgentScenario);
    std::ostringstream out, err;
    REQUIRE(cli::run({"simulate", "--scenario", scenario.string(), "--out",
                      (dir / "run").string(), "--h", "5e-4", "--t-end", "2.0"},
                     out, err) == cli::kExitOk);
    std::istringstream lines(slurp(dir / "run" / "trajectory.csv"));
    std::string line, last;
    std::getline(lines, line);  // header
    std::size_t samples = 0;
    while (std::getline(lines, line))
        if (!line.empty()) {
            last = line;
            ++samples;
        }
    CHECK(samples == 401);  // 2.0 s at h = 5e-4 with stride 10, plus the t = 0 row
    CHECK(std::strtod(last.c_str(), nullptr) == Approx(2.0).margin(1e-9));
}

TEST_CASE("sweeping L_f below the threshold keeps the envelope verdict true") {
    const fs::path scenario = fs::path(SYNCNET_SCENARIO_DIR) / "lipschitz_envelope.json";
    // values at 50% and 90% of the certified threshold rho_star / 2
    NetworkParams p;
    p.num_agents = 2;
    p.a_lo = p.a_hi = 1.0;
    p.tau_d = 1.0;
    p.window_T = 1.0;
    p.lipschitz = 0.0;
    const double half_rate = leaderless_lipschitz_certificate(p).at("rho_star") / 2.0;
    const fs::path dir = temp_dir("sweep_lf");
    std::ostringstream out, err;
    const int code = cli::cmd_sweep(scenario.string(), "L_f",
                                    {0.5 * half_rate, 0.9 * half_rate}, (dir / "out").string(),
                                    2, out, err);
    REQUIRE(code == cli::kExitOk);
    std::istringstream lines(slurp(dir / "out" / "summary.csv"));
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty())
            continue;
        ++rows;
        CHECK(line.find("true,satisfied") != std::string::npos);
    }
    CHECK(rows == 2);
}

TEST_CASE("the argument-vector entry point dispatches and reports usage errors") {
    const fs::path dir = temp_dir("run_entry");
    const fs::path scenario = write_file(dir, "scenario.json", kTwoAgentScenario);

    std::ostringstream out, err;
    CHECK(cli::run({"simulate", "--scenario", scenario.string(), "--out",
                    (dir / "run").string()},
                   out, err) == cli::kExitOk);

    std::ostringstream out2, err2;
    CHECK(cli::run({"simulate"}, out2, err2) == cli::kExitUsage);

    std::ostringstream out3, err3;
    CHECK(cli::run({"certify", "--agents", "2", "--a-lo", "1", "--a-hi", "1", "--tau-d", "1",
                    "--window", "1", "--lipschitz", "1e-5"},
                   out3, err3) == cli::kExitOk);

    std::ostringstream out4, err4;
    CHECK(cli::run({}, out4, err4) == cli::kExitOk);  // prints help
    CHECK(out4.str().find("simulate") != std::string::npos);
}
