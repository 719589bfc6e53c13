#pragma once

// Experiment configuration: a JSON document whose sections mirror
// ExperimentConfig. Example:
//
//   {
//     "situation": "bond",
//     "rho": {"D": 0.4, "atoms": [[0.6, 0.25], [1.4, 0.25]], "uniforms": [[0.5, 1.5, 0.5]]},
//     "nu":  {"atoms": [[1.0, 0.5]], "uniforms": [[0.5, 2.0, 0.5]]},
//     "p": 0.3, "n_steps": 2000000,
//     "seeds": {"env": 1, "walk": 2, "noise": 3},
//     "case_hint": "auto",
//     "known": {"p_known": true, "M": 2, "which": "rho"},
//     "output": {"dir": "out"},
//     "evaluation": {"enabled": false, "search_radius": 100000},
//     "reconstruction": {"min_repeats": 2, "se_mult": 3.0, "max_extent": 64}
//   }

#include "rwre/distribution.hpp"
#include "rwre/env_reconstruct.hpp"
#include "rwre/error.hpp"
#include "rwre/law_reconstruct.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

namespace rwre {

struct Seeds {
    std::uint64_t env = 1;
    std::uint64_t walk = 2;
    std::uint64_t noise = 3;
};

struct KnownInputs {
    bool p_known = false;
    std::optional<std::size_t> M;
    CountKind which = CountKind::RhoCount;
};

struct ReconstructionSettings {
    std::size_t min_repeats = 2;
    std::optional<double> h_floor;
    double se_mult = 3.0;
    std::size_t max_extent = 64;
    std::size_t window = 32;
    std::size_t recurrence_threshold = 10;
    bool classify_noise = true;
    bool filter = true;
    bool size_bias_correction = true;
};

struct ExperimentConfig {
    Situation situation = Situation::Site;
    DistributionSpec rho;
    DistributionSpec nu;
    double p = 0.0;
    std::int64_t n_steps = 0;
    Seeds seeds;
    CaseKind case_hint = CaseKind::Auto;
    KnownInputs known;
    std::string output_dir = ".";
    bool evaluation = false;
    std::int64_t search_radius = 100000;
    ReconstructionSettings reconstruction;

    /// Auto resolves to case (a) iff rho has a continuous part.
    [[nodiscard]] CaseKind resolved_case() const {
        if (case_hint != CaseKind::Auto) return case_hint;
        return rho.has_continuous_part() ? CaseKind::CaseA : CaseKind::CaseB;
    }
};

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void config_fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        config_fail(std::string("key '") + key + "' has the wrong type");
    }
}

inline DistributionSpec parse_law(const json& j, Situation situation, std::optional<double> bound, const char* name) {
    if (!j.is_object()) config_fail(std::string("section '") + name + "' must be an object");
    DistributionSpec spec;
    spec.situation = situation;
    const char* bound_key = situation == Situation::Site ? "kappa" : "D";
    if (j.contains(bound_key)) spec.support_bound = j.at(bound_key).get<double>();
    else if (bound) spec.support_bound = *bound;
    else config_fail(std::string("section '") + name + "' needs '" + bound_key + "'");
    try {
        for (const auto& a : j.value("atoms", json::array())) {
            if (!a.is_array() || a.size() != 2) config_fail(std::string(name) + ".atoms entries are [value, weight]");
            spec.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        for (const auto& u : j.value("uniforms", json::array())) {
            if (!u.is_array() || u.size() != 3)
                config_fail(std::string(name) + ".uniforms entries are [lower, upper, weight]");
            spec.pieces.push_back({u[0].get<double>(), u[1].get<double>(), u[2].get<double>()});
        }
    } catch (const json::exception& e) {
        config_fail(std::string(name) + ": " + e.what());
    }
    if (get_or(j, "symmetrize", false)) {
        if (situation != Situation::Site) config_fail("symmetrize applies to site laws only");
        spec = symmetrize(spec);
    }
    return spec;
}

inline CaseKind parse_case(const std::string& s) {
    if (s == "auto") return CaseKind::Auto;
    if (s == "a" || s == "A") return CaseKind::CaseA;
    if (s == "b" || s == "B") return CaseKind::CaseB;
    config_fail("case_hint must be auto, a or b");
}

} // namespace detail

/// Checks the standing hypotheses; error messages name the hypothesis violated.
inline void validate_config(const ExperimentConfig& cfg) {
    auto law_check = [](const DistributionSpec& spec, const char* name) {
        try {
            validate_spec(spec);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, std::string(name) + ": " + e.what());
        }
    };
    law_check(cfg.rho, "rho");
    law_check(cfg.nu, "nu");
    if (!(cfg.p >= 0.0 && cfg.p < 1.0)) detail::config_fail("p must lie in [0,1)");
    if (cfg.n_steps < 1) detail::config_fail("n_steps must be positive");
    for (const auto& a : cfg.rho.atoms)
        if (cfg.nu.atom_values().contains(a.value))
            detail::config_fail("atoms of rho and nu must have disjoint support; both contain " +
                                detail::fmt_value(a.value));
    if (cfg.situation == Situation::Site) {
        const auto st = compute_stats(cfg.rho);
        if (!check_recurrent_site(st))
            detail::config_fail("recurrence needs E log(omega/(1-omega)) = 0 and a non-degenerate rho; got mean " +
                                detail::fmt_value(st.log_odds_mean) + ", variance " +
                                detail::fmt_value(st.log_odds_var));
        const double kappa = cfg.rho.support_bound;
        if (cfg.resolved_case() == CaseKind::CaseB && cfg.known.p_known && !(cfg.p < kappa / (kappa + 1.0)))
            detail::config_fail("purely atomic site law needs a known p < kappa/(kappa+1) = " +
                                detail::fmt_value(kappa / (kappa + 1.0)) + ", got p = " + detail::fmt_value(cfg.p));
    }
    if (cfg.known.M && *cfg.known.M == 0) detail::config_fail("known.M must be positive");
}

/// Extra hypothesis for environment reconstruction.
inline void validate_env_config(const ExperimentConfig& cfg) {
    if (!cfg.rho.has_continuous_part())
        detail::config_fail("environment reconstruction needs rho != rho_a (a non-atomic part)");
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::get_or;
    if (!j.is_object()) detail::config_fail("config must be a JSON object");
    ExperimentConfig cfg;
    const auto situation = get_or<std::string>(j, "situation", "");
    if (situation == "site") cfg.situation = Situation::Site;
    else if (situation == "bond") cfg.situation = Situation::Bond;
    else detail::config_fail("situation must be 'site' or 'bond'");

    if (!j.contains("rho")) detail::config_fail("missing section 'rho'");
    if (!j.contains("nu")) detail::config_fail("missing section 'nu'");
    cfg.rho = detail::parse_law(j.at("rho"), cfg.situation, std::nullopt, "rho");
    cfg.nu = detail::parse_law(j.at("nu"), cfg.situation, cfg.rho.support_bound, "nu");
    cfg.p = get_or(j, "p", 0.0);
    cfg.n_steps = get_or<std::int64_t>(j, "n_steps", 0);
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        cfg.seeds.env = get_or<std::uint64_t>(s, "env", cfg.seeds.env);
        cfg.seeds.walk = get_or<std::uint64_t>(s, "walk", cfg.seeds.walk);
        cfg.seeds.noise = get_or<std::uint64_t>(s, "noise", cfg.seeds.noise);
    }
    cfg.case_hint = detail::parse_case(get_or<std::string>(j, "case_hint", "auto"));
    if (j.contains("known")) {
        const auto& k = j.at("known");
        cfg.known.p_known = get_or(k, "p_known", false);
        if (k.contains("M") && !k.at("M").is_null()) cfg.known.M = get_or<std::size_t>(k, "M", 0);
        const auto which = get_or<std::string>(k, "which", "rho");
        if (which == "rho") cfg.known.which = CountKind::RhoCount;
        else if (which == "nu") cfg.known.which = CountKind::NuCount;
        else detail::config_fail("known.which must be 'rho' or 'nu'");
    }
    if (j.contains("output")) cfg.output_dir = get_or<std::string>(j.at("output"), "dir", cfg.output_dir);
    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        if (e.is_boolean()) cfg.evaluation = e.get<bool>();
        else {
            cfg.evaluation = get_or(e, "enabled", false);
            cfg.search_radius = get_or<std::int64_t>(e, "search_radius", cfg.search_radius);
        }
    }
    if (j.contains("reconstruction")) {
        const auto& r = j.at("reconstruction");
        auto& rs = cfg.reconstruction;
        rs.min_repeats = get_or<std::size_t>(r, "min_repeats", rs.min_repeats);
        if (r.contains("h_floor") && !r.at("h_floor").is_null()) rs.h_floor = get_or(r, "h_floor", 0.0);
        rs.se_mult = get_or(r, "se_mult", rs.se_mult);
        rs.max_extent = get_or<std::size_t>(r, "max_extent", rs.max_extent);
        rs.window = get_or<std::size_t>(r, "window", rs.window);
        rs.recurrence_threshold = get_or<std::size_t>(r, "recurrence_threshold", rs.recurrence_threshold);
        rs.classify_noise = get_or(r, "classify_noise", rs.classify_noise);
        rs.filter = get_or(r, "filter", rs.filter);
        rs.size_bias_correction = get_or(r, "size_bias_correction", rs.size_bias_correction);
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, "cannot parse " + path + ": " + e.what());
    }
    auto cfg = parse_config(j);
    validate_config(cfg);
    return cfg;
}

inline LawConfig law_config(const ExperimentConfig& cfg) {
    LawConfig lc;
    lc.situation = cfg.situation;
    lc.case_kind = cfg.resolved_case();
    if (cfg.known.p_known) lc.p_known = cfg.p;
    lc.kappa = cfg.rho.support_bound;
    lc.M = cfg.known.M;
    lc.which = cfg.known.which;
    lc.min_repeats = cfg.reconstruction.min_repeats;
    lc.h_floor = cfg.reconstruction.h_floor;
    lc.se_mult = cfg.reconstruction.se_mult;
    lc.recurrence_threshold = cfg.reconstruction.recurrence_threshold;
    lc.classify_noise = cfg.reconstruction.classify_noise;
    lc.size_bias_correction = cfg.reconstruction.size_bias_correction;
    return lc;
}

inline AssembleOptions assemble_options(const ExperimentConfig& cfg) {
    AssembleOptions o;
    o.max_extent = cfg.reconstruction.max_extent;
    o.window = cfg.reconstruction.window;
    o.filter = cfg.reconstruction.filter;
    return o;
}

} // namespace rwre
