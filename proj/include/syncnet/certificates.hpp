#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace syncnet {

/// Network-level constants a certificate is a pure function of: agent count, coupling
/// weight band [a_lo, a_hi], leader weight floor b_lo (when a leader exists), dwell time
/// tau_D, joint-connectivity window T, and the global Lipschitz constant L.
struct NetworkParams {
    int num_agents = 2;
    double a_lo = 1.0;
    double a_hi = 1.0;
    double tau_d = 1.0;
    double window_T = 1.0;
    std::optional<double> b_lo;
    std::optional<double> lipschitz;

    void validate() const {
        if (num_agents < 2)
            throw std::invalid_argument("NetworkParams: need at least two agents");
        if (!(a_lo > 0.0) || !(a_lo <= a_hi))
            throw std::invalid_argument("NetworkParams: require 0 < a_lo <= a_hi");
        if (!(tau_d > 0.0))
            throw std::invalid_argument("NetworkParams: dwell time must be positive");
        if (!(window_T > 0.0))
            throw std::invalid_argument("NetworkParams: window T must be positive");
        if (b_lo && !(*b_lo > 0.0))
            throw std::invalid_argument("NetworkParams: leader weight floor must be positive");
        if (lipschitz && *lipschitz < 0.0)
            throw std::invalid_argument("NetworkParams: Lipschitz constant must be nonnegative");
    }
};

enum class Verdict { Satisfied, Violated, NotApplicable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "unknown";
}

/// Named constant bundle plus the sufficient-condition verdict it supports.
struct Certificate {
    std::string provenance;
    Verdict verdict = Verdict::NotApplicable;
    std::vector<std::pair<std::string, double>> constants;
    std::vector<std::string> notes;

    double at(const std::string& name) const {
        for (const auto& [key, value] : constants)
            if (key == name)
                return value;
        throw std::out_of_range("Certificate: no constant named " + name);
    }

    bool has(const std::string& name) const {
        for (const auto& [key, value] : constants)
            if (key == name)
                return true;
        return false;
    }
};

/// T0 = T + 2 tau_D: one connectivity window padded by a dwell interval on each side.
inline double compute_t0(const NetworkParams& p) {
    p.validate();
    return p.window_T + 2.0 * p.tau_d;
}

/// Contraction diagnostics for the non-expansive analysis. No threshold condition is
/// attached; the factors quantify the per-window contraction the convexity argument
/// yields, for both the directed (rho) and undirected (rho_hat) routes.
inline Certificate nonexpansive_contraction_factors(const NetworkParams& p) {
    p.validate();
    const double n = static_cast<double>(p.num_agents);
    const double t0 = compute_t0(p);
    const double lambda_1 = p.a_hi * (n - 1.0);
    const double lambda_2 = p.a_hi * (n - 2.0) + p.a_lo;
    const double rho = std::exp(-p.a_hi * (n - 1.0) * (n - 1.0) * t0);
    const double one_minus_mu = p.a_lo * (-std::expm1(-lambda_2 * p.tau_d)) / lambda_2;
    const double mu = 1.0 - one_minus_mu;
    const double phi_step = one_minus_mu * rho * rho;
    const double phi_last = std::pow(phi_step, n - 1.0);
    const double rho_hat = std::exp(-p.a_hi * (n - 1.0) * p.tau_d);
    const double phi_hat_step = one_minus_mu * rho_hat * rho_hat;
    const double phi_hat_last = std::pow(phi_hat_step, n - 1.0);

    Certificate cert;
    cert.provenance = "non-expansive contraction diagnostics";
    cert.verdict = Verdict::NotApplicable;
    cert.notes.push_back("diagnostic only: the asymptotic results need no threshold");
    cert.constants = {
        {"T0", t0},
        {"lambda_1", lambda_1},
        {"lambda_2", lambda_2},
        {"rho", rho},
        {"mu", mu},
        {"phi_N_minus_1", phi_last},
        {"rho_hat", rho_hat},
        {"phi_hat_N_minus_1", phi_hat_last},
    };
    return cert;
}

/// Exponential-synchronization certificate for leaderless networks with globally
/// Lipschitz dynamics: rate rho_star and envelope (gamma, lambda = rho_star - 2L),
/// sufficient when L < rho_star / 2.
inline Certificate leaderless_lipschitz_certificate(const NetworkParams& p) {
    p.validate();
    if (!p.lipschitz)
        throw std::invalid_argument("leaderless_lipschitz_certificate: L required");
    const double n = static_cast<double>(p.num_agents);
    const double lips = *p.lipschitz;
    const double n_bar = n - 1.0;
    const double t0 = compute_t0(p);
    const double alpha = (2.0 * n - 3.0) * p.a_hi + p.a_lo;
    const double alpha_bar = 2.0 * (n - 1.0) * p.a_hi;
    const double beta_star =
        (-std::expm1(-alpha * p.tau_d)) * (p.a_lo / alpha) * std::exp(-alpha_bar * n_bar * t0);
    const double beta_pow = std::pow(beta_star, n_bar);
    const double beta_tilde = 1.0 - beta_pow;
    // ln(1 / beta_tilde) = -log1p(-beta_pow), kept in this form for small beta_pow
    const double rho_star = -std::log1p(-beta_pow) / (n_bar * t0);

    Certificate cert;
    cert.provenance = "leaderless global-Lipschitz exponential certificate";
    if (!(beta_pow > 0.0) || !(beta_pow < 1.0) || !std::isfinite(rho_star)) {
        cert.verdict = Verdict::NotApplicable;
        cert.notes.push_back("contraction factor left (0,1); constants not usable at these parameters");
        cert.constants = {{"N_bar", n_bar}, {"T0", t0},       {"alpha", alpha},
                          {"alpha_bar", alpha_bar}, {"beta_star", beta_star}};
        return cert;
    }
    const double gamma = 1.0 / beta_tilde;
    const double lambda = rho_star - 2.0 * lips;
    cert.verdict = (lips < 0.5 * rho_star) ? Verdict::Satisfied : Verdict::Violated;
    cert.constants = {
        {"N_bar", n_bar},
        {"T0", t0},
        {"alpha", alpha},
        {"alpha_bar", alpha_bar},
        {"beta_star", beta_star},
        {"beta_tilde", beta_tilde},
        {"rho_star", rho_star},
        {"gamma", gamma},
        {"lambda", lambda},
        {"L", lips},
    };
    return cert;
}

/// Exponential-tracking certificate for leader-follower networks: rate rho_hat_star
/// over windows of length T_star = N T0, sufficient when L < rho_hat_star / 2.
/// The printed positive exponent in the delta_N chain is kept as-is; parameters that
/// push delta_N outside (0,1) yield a not-applicable verdict instead of a clamp.
inline Certificate leader_follower_certificate(const NetworkParams& p) {
    p.validate();
    if (p.num_agents < 2)
        throw std::invalid_argument("leader_follower_certificate: degenerate follower count");
    if (!p.b_lo)
        throw std::invalid_argument("leader_follower_certificate: b_lo required");
    if (!p.lipschitz)
        throw std::invalid_argument("leader_follower_certificate: L required (0 allowed)");

    const double n = static_cast<double>(p.num_agents);
    const double b = *p.b_lo;
    const double lips = *p.lipschitz;
    const double t0 = compute_t0(p);
    // conservative window multiplier: N T0 (the larger of the two stated variants)
    const double t_star = n * t0;
    const double lambda_bar_1 = p.a_hi * (n - 1.0);
    const double lambda_bar_2 = p.a_hi * (n - 2.0) + p.a_lo;
    const double lambda_hat_1 = p.a_hi * (n - 1.0) + b;
    const double delta_hat_1 = 1.0 - b * (-std::expm1(-lambda_hat_1 * p.tau_d)) / lambda_hat_1;
    const double eta = std::exp(-lambda_bar_1 * (n + 1.0) * t0) *
                       (-std::expm1(-lambda_bar_2 * p.tau_d)) * p.a_lo /
                       (p.a_hi * (n - 2.0) + p.a_lo);
    const double growth = std::exp(0.5 * (n - 2.0) * (n + 1.0) * lambda_bar_1 * t0);
    const double shrink = std::pow(eta, n - 1.0) * growth * b *
                          (-std::expm1(-lambda_hat_1 * p.tau_d)) / (p.a_hi * (n - 1.0) + b);
    const double delta_n = 1.0 - shrink;

    Certificate cert;
    cert.provenance = "leader-follower global-Lipschitz exponential certificate";
    cert.notes.push_back("T_star uses the conservative multiplier N*T0");
    if (!(shrink > 0.0) || !(shrink < 1.0)) {
        cert.verdict = Verdict::NotApplicable;
        cert.notes.push_back("delta_N fell outside (0,1) with the formula as printed");
        cert.constants = {{"T0", t0},
                          {"T_star", t_star},
                          {"lambda_bar_1", lambda_bar_1},
                          {"lambda_bar_2", lambda_bar_2},
                          {"lambda_hat_1", lambda_hat_1},
                          {"delta_hat_1", delta_hat_1},
                          {"eta", eta},
                          {"delta_N", delta_n}};
        return cert;
    }
    const double rho_hat_star = -std::log1p(-shrink) / t_star;
    const double gamma = 1.0 / delta_n;
    const double lambda = rho_hat_star - 2.0 * lips;
    cert.verdict = (lips < 0.5 * rho_hat_star) ? Verdict::Satisfied : Verdict::Violated;
    cert.constants = {
        {"T0", t0},
        {"T_star", t_star},
        {"lambda_bar_1", lambda_bar_1},
        {"lambda_bar_2", lambda_bar_2},
        {"lambda_hat_1", lambda_hat_1},
        {"delta_hat_1", delta_hat_1},
        {"eta", eta},
        {"delta_N", delta_n},
        {"rho_hat_star", rho_hat_star},
        {"gamma", gamma},
        {"lambda", lambda},
        {"L", lips},
    };
    return cert;
}

}  // namespace syncnet
