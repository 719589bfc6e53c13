#pragma once

// Subcommands of the rwre tool. Each one is a function of the config file,
// its input files and the seeds; outputs go to the --out directory.

#include "rwre/config.hpp"
#include "rwre/env_reconstruct.hpp"
#include "rwre/environment.hpp"
#include "rwre/io.hpp"
#include "rwre/law_reconstruct.hpp"
#include "rwre/sweep.hpp"
#include "rwre/walk.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace rwre::cli {

namespace fs = std::filesystem;

enum ExitCode : int { Ok = 0, ValidationFailure = 2, RuntimeFailure = 3, IoFailure = 4 };

inline int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::WeightSumError:
    case ErrorCode::SupportViolation:
    case ErrorCode::DuplicateAtom:
    case ErrorCode::InvalidPiece: return ValidationFailure;
    case ErrorCode::IoError: return IoFailure;
    default: return RuntimeFailure;
    }
}

struct Options {
    std::string config;
    std::optional<std::string> chi;
    std::optional<std::string> out;
    std::optional<std::string> grid;
    bool eval = false;
    bool timing = true;
};

struct Context {
    ExperimentConfig cfg;
    fs::path out_dir;
    bool eval = false;
};

inline Context make_context(const Options& opt) {
    Context ctx;
    ctx.cfg = load_config(opt.config);
    ctx.out_dir = opt.out ? fs::path(*opt.out) : fs::path(ctx.cfg.output_dir);
    ctx.eval = opt.eval || ctx.cfg.evaluation;
    return ctx;
}

inline fs::path chi_path(const Options& opt, const Context& ctx) {
    return opt.chi ? fs::path(*opt.chi) : ctx.out_dir / "chi.csv";
}

inline void cmd_simulate(const Context& ctx, std::ostream& log) {
    const auto& cfg = ctx.cfg;
    Environment env(cfg.rho, cfg.seeds.env);
    const auto run = generate_run(env, cfg.n_steps, cfg.seeds.walk, cfg.p, cfg.nu, cfg.seeds.noise, true);
    io::atomic_write(ctx.out_dir / "chi.csv", [&](std::ostream& os) { io::write_chi_csv(os, run, ctx.eval); });

    const auto& pos = run.truth->trajectory.positions;
    const auto [lo, hi] = std::minmax_element(pos.begin(), pos.end());
    std::size_t flipped = 0;
    for (auto x : run.truth->xi) flipped += x;
    log << "simulated n=" << cfg.n_steps << " situation=" << to_string(cfg.situation) << " range=[" << *lo << ','
        << *hi << "] corrupted=" << io::format_double(static_cast<double>(flipped) / static_cast<double>(run.chi.size()))
        << " -> " << (ctx.out_dir / "chi.csv").string() << '\n';
}

inline void cmd_reconstruct_law(const Context& ctx, const fs::path& chi_file, std::ostream& log) {
    const auto& cfg = ctx.cfg;
    const auto run = io::read_chi_csv(chi_file);
    const auto report = reconstruct_law(run.chi, law_config(cfg));

    auto j = io::report_json(report, "fresh_samples.csv");
    if (ctx.eval) {
        j["law_distance"] = io::law_distance_json(score_law(report, cfg.rho));
        const auto [ok, total] = atom_accuracy(report.classification, cfg.rho, cfg.nu);
        j["atoms_correct"] = ok;
        j["atoms_total"] = total;
    }
    io::atomic_write(ctx.out_dir / "fresh_samples.csv", io::samples_csv(report.fresh_observations));
    io::atomic_write(ctx.out_dir / "classification.csv", io::classification_csv(report.classification));
    io::atomic_write(ctx.out_dir / "report.json", j.dump(2) + "\n");

    log << "case " << to_string(report.case_kind) << ": " << report.classification.count(Label::RhoAtom)
        << " rho atoms, " << report.classification.count(Label::NuAtom) << " nu atoms, "
        << report.fresh_observations.size() << " fresh observations";
    if (j.contains("law_distance")) log << ", ks=" << io::format_double(j["law_distance"]["ks"].get<double>());
    log << " -> " << (ctx.out_dir / "report.json").string() << '\n';
}

inline void cmd_reconstruct_env(const Context& ctx, const fs::path& chi_file, std::ostream& log) {
    const auto& cfg = ctx.cfg;
    validate_env_config(cfg);
    const auto run = io::read_chi_csv(chi_file);
    const IndexedStream stream(run.chi);
    const auto report = reconstruct_law(stream, law_config(cfg));
    auto recon = assemble(stream, report.classification, assemble_options(cfg));
    recon = orient(std::move(recon), stream, report.classification, cfg.situation);

    std::optional<AlignResult> align;
    if (ctx.eval) {
        Environment env(cfg.rho, cfg.seeds.env);
        align = align_score(recon, env, cfg.search_radius);
    }
    io::atomic_write(ctx.out_dir / "environment.csv", io::environment_csv(recon, align));
    for (const auto& a : recon.anomalies) log << "anomaly: " << a << '\n';
    log << "assembled " << recon.values.size() << " values, oriented=" << (recon.oriented ? "true" : "false")
        << " (votes " << recon.orientation.consistent << ':' << recon.orientation.contradicting << ')';
    if (align)
        log << ", match_length=" << align->match_length << " exact=" << (align->exact ? "true" : "false")
            << " shift=" << align->best_shift;
    log << " -> " << (ctx.out_dir / "environment.csv").string() << '\n';
}

inline void cmd_sweep(const Context& ctx, const std::string& grid_text, bool timing, std::ostream& log) {
    const auto grid = parse_grid(grid_text);
    const auto rows = sweep(ctx.cfg, grid, thread_count());
    io::atomic_write(ctx.out_dir / "sweep.csv", sweep_csv(rows, ctx.cfg.situation, timing));
    const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.result.error.empty(); });
    log << rows.size() << " rows (" << failed << " with errors) -> " << (ctx.out_dir / "sweep.csv").string() << '\n';
}

/// Runs one subcommand and maps failures to exit codes.
inline int run(const std::string& command, const Options& opt, std::ostream& log, std::ostream& err) {
    try {
        const auto ctx = make_context(opt);
        if (command == "simulate") cmd_simulate(ctx, log);
        else if (command == "reconstruct-law") cmd_reconstruct_law(ctx, chi_path(opt, ctx), log);
        else if (command == "reconstruct-env") cmd_reconstruct_env(ctx, chi_path(opt, ctx), log);
        else if (command == "sweep") {
            if (!opt.grid) throw Error(ErrorCode::ConfigError, "sweep needs --grid");
            cmd_sweep(ctx, *opt.grid, opt.timing, log);
        } else {
            throw Error(ErrorCode::ConfigError, "unknown subcommand " + command);
        }
        return Ok;
    } catch (const Error& e) {
        err << "error: " << e.what();
        if (e.code() == ErrorCode::InsufficientAnchors) err << " (try a larger n_steps)";
        err << '\n';
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return IoFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return RuntimeFailure;
    }
}

} // namespace rwre::cli
