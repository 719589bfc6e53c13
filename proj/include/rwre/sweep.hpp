#pragma once

// End-to-end replicas (simulate, corrupt, reconstruct, score) and grids of them.

#include "rwre/config.hpp"
#include "rwre/env_reconstruct.hpp"
#include "rwre/environment.hpp"
#include "rwre/law_reconstruct.hpp"
#include "rwre/metrics.hpp"
#include "rwre/walk.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace rwre {

struct Grid {
    std::vector<std::int64_t> n_steps;
    std::size_t seeds = 1;
};

/// "n1,n2,...xS": the listed walk lengths, each with S replica seeds.
inline Grid parse_grid(const std::string& text) {
    Grid g;
    const auto x = text.find('x');
    const std::string list = text.substr(0, x);
    if (x != std::string::npos) {
        try {
            g.seeds = static_cast<std::size_t>(std::stoull(text.substr(x + 1)));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, "grid seed count must be an integer: " + text);
        }
    }
    std::size_t pos = 0;
    while (pos <= list.size()) {
        auto comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        const std::string item = list.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            const auto n = std::stoll(item, &used);
            if (used != item.size() || n < 1) throw std::invalid_argument(item);
            g.n_steps.push_back(n);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, "grid entries must be positive integers: " + text);
        }
        pos = comma + 1;
    }
    if (g.n_steps.empty() || g.seeds == 0) throw Error(ErrorCode::ConfigError, "empty grid: " + text);
    return g;
}

/// RWRE_THREADS if set, otherwise the hardware concurrency.
inline std::size_t thread_count() {
    if (const char* env = std::getenv("RWRE_THREADS")) {
        try {
            const auto n = std::stoll(env);
            if (n >= 1) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

/// Config for replica `index` of a grid point: every seed shifted by the index.
inline ExperimentConfig replica_config(const ExperimentConfig& base, std::int64_t n_steps, std::uint64_t index) {
    ExperimentConfig c = base;
    c.n_steps = n_steps;
    c.seeds.env = base.seeds.env + index;
    c.seeds.walk = base.seeds.walk + index;
    c.seeds.noise = base.seeds.noise + index;
    return c;
}

struct ReplicaResult {
    std::optional<ReconstructionReport> report;
    std::optional<LawDistance> distance;
    std::size_t atoms_correct = 0;
    std::size_t atoms_total = 0;
    std::optional<ReconstructedEnvironment> environment;
    std::optional<AlignResult> align;
    std::string error;
};

/// Counts the atoms of rho labelled RhoAtom and the atoms of nu labelled NuAtom.
inline std::pair<std::size_t, std::size_t> atom_accuracy(const Classification& cls, const DistributionSpec& rho,
                                                         const DistributionSpec& nu) {
    std::size_t ok = 0;
    for (const auto& a : rho.atoms) ok += cls.label_of(a.value) == Label::RhoAtom ? 1 : 0;
    for (const auto& a : nu.atoms) ok += cls.label_of(a.value) == Label::NuAtom ? 1 : 0;
    return {ok, rho.atoms.size() + nu.atoms.size()};
}

/// Distances of a law estimate to the true rho: in case (a) the non-atomic
/// fresh observations against the continuous part, with atom fractions scored
/// separately; in case (b) the atomic estimate against rho.
inline LawDistance score_law(const ReconstructionReport& r, const DistributionSpec& rho) {
    LawDistance d;
    EmpiricalMeasure atoms;
    atoms.atom_weights = r.estimated_atoms;
    if (r.case_kind == CaseKind::CaseA && rho.has_continuous_part()) {
        RWRE_REQUIRE(!r.continuous_samples.empty(), ErrorCode::EmptySample, "no non-atomic fresh observations");
        d.ks = ks_distance(r.continuous_estimate, rho.continuous_part());
        d.wasserstein1 = wasserstein1_distance(r.continuous_estimate, rho.continuous_part());
        d.n_samples = r.continuous_samples.size();
    } else {
        d = law_distance(r.estimated, rho);
    }
    d.tv_atoms = tv_atoms(atoms, rho);
    return d;
}

/// One full pipeline run; reconstruction failures are recorded, not thrown.
inline ReplicaResult run_replica(const ExperimentConfig& cfg, bool with_environment) {
    ReplicaResult out;
    Environment env(cfg.rho, cfg.seeds.env);
    const auto run = generate_run(env, cfg.n_steps, cfg.seeds.walk, cfg.p, cfg.nu, cfg.seeds.noise, false);
    const IndexedStream stream(run.chi);
    try {
        out.report = reconstruct_law(stream, law_config(cfg));
        std::tie(out.atoms_correct, out.atoms_total) = atom_accuracy(out.report->classification, cfg.rho, cfg.nu);
        out.distance = score_law(*out.report, cfg.rho);
    } catch (const Error& e) {
        out.error = e.what();
        return out;
    }
    if (with_environment && cfg.rho.has_continuous_part()) {
        try {
            auto recon = assemble(stream, out.report->classification, assemble_options(cfg));
            recon = orient(std::move(recon), stream, out.report->classification, cfg.situation);
            out.align = align_score(recon, env, cfg.search_radius);
            out.environment = std::move(recon);
        } catch (const Error& e) {
            out.error = e.what();
        }
    }
    return out;
}

struct SweepRow {
    std::int64_t n_steps = 0;
    std::uint64_t seed = 0;
    ReplicaResult result;
    CaseKind case_kind = CaseKind::Auto;
    double wall_ms = 0.0;
};

/// Runs every (n_steps, replica) of the grid, in parallel across rows; rows
/// come back in grid order.
inline std::vector<SweepRow> sweep(const ExperimentConfig& base, const Grid& grid, std::size_t threads,
                                   bool with_environment = true) {
    std::vector<SweepRow> rows;
    for (auto n : grid.n_steps)
        for (std::size_t s = 0; s < grid.seeds; ++s) rows.push_back({n, static_cast<std::uint64_t>(s), {}, {}, 0.0});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            auto& row = rows[i];
            const auto cfg = replica_config(base, row.n_steps, row.seed);
            row.case_kind = cfg.resolved_case();
            const auto t0 = std::chrono::steady_clock::now();
            try {
                row.result = run_replica(cfg, with_environment);
            } catch (const std::exception& e) {
                row.result.error = e.what();
            }
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, rows.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

namespace detail {

inline std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + '"';
}

} // namespace detail

/// With timing off, wall_ms is written as 0 so reruns are byte-identical.
inline std::string sweep_csv(const std::vector<SweepRow>& rows, Situation situation, bool timing) {
    auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::string out =
        "n_steps,seed,situation,case,ks,w1,tv_atoms,atoms_correct,atoms_total,match_length,oriented,error,wall_ms\n";
    for (const auto& row : rows) {
        const auto& r = row.result;
        out += std::to_string(row.n_steps) + ',' + std::to_string(row.seed) + ',' + to_string(situation) + ',' +
               to_string(row.case_kind) + ',';
        if (r.distance)
            out += num(r.distance->ks) + ',' + num(r.distance->wasserstein1) + ',' + num(r.distance->tv_atoms) + ',';
        else
            out += ",,,";
        out += std::to_string(r.atoms_correct) + ',' + std::to_string(r.atoms_total) + ',';
        out += std::to_string(r.align ? r.align->match_length : 0) + ',';
        out += std::string(r.environment && r.environment->oriented ? "true" : "false") + ',';
        out += detail::csv_field(r.error) + ',';
        out += timing ? num(std::round(row.wall_ms * 1000.0) / 1000.0) : std::string("0");
        out += '\n';
    }
    return out;
}

} // namespace rwre
