#pragma once

// File formats. Floats are written as the shortest decimal that reads back to
// the same double, so every file round-trips bit-exactly. Files are written to
// a temporary sibling and renamed into place.

#include "rwre/classification.hpp"
#include "rwre/env_reconstruct.hpp"
#include "rwre/error.hpp"
#include "rwre/law_reconstruct.hpp"
#include "rwre/metrics.hpp"
#include "rwre/walk.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace rwre::io {

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Calls `body` on a stream for a temporary file, then renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        body(out);
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot move file into " + path.string());
    }
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    atomic_write(path, [&](std::ostream& os) { os << content; });
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::string s;
    in.seekg(0, std::ios::end);
    s.resize(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(s.data(), static_cast<std::streamsize>(s.size()));
    return s;
}

// ---------------------------------------------------------------------------
// Observation stream: n,chi[,x,chi_prime,xi,y]
// ---------------------------------------------------------------------------

inline void write_chi_csv(std::ostream& os, const ObservationRun& run, bool with_truth) {
    const bool truth = with_truth && run.truth.has_value();
    os << (truth ? "n,chi,x,chi_prime,xi,y\n" : "n,chi\n");
    std::string line;
    for (std::size_t i = 0; i < run.chi.size(); ++i) {
        const auto n = static_cast<std::size_t>(run.start_index) + i;
        line.clear();
        line += std::to_string(n);
        line += ',';
        line += format_double(run.chi[i]);
        if (truth) {
            const auto& t = *run.truth;
            line += ',';
            line += std::to_string(t.trajectory.positions.empty() ? 0 : t.trajectory.positions[n]);
            line += ',';
            line += format_double(t.chi_prime[i]);
            line += ',';
            line += t.xi[i] ? '1' : '0';
            line += ',';
            line += format_double(t.y[i]);
        }
        line += '\n';
        os << line;
    }
}

/// Reads the n and chi columns; any other columns are ignored.
inline ObservationRun read_chi_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    ObservationRun run;
    std::size_t pos = text.find('\n');
    if (pos == std::string::npos || text.compare(0, 5, "n,chi") != 0)
        throw Error(ErrorCode::IoError, path.string() + ": expected header starting with n,chi");
    ++pos;
    bool first = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        const std::size_t c1 = line.find(',');
        if (c1 == std::string_view::npos) throw Error(ErrorCode::IoError, path.string() + ": malformed row");
        std::size_t c2 = line.find(',', c1 + 1);
        if (c2 == std::string_view::npos) c2 = line.size();
        std::int64_t n = 0;
        const auto rn = std::from_chars(line.data(), line.data() + c1, n);
        const auto v = parse_double(line.substr(c1 + 1, c2 - c1 - 1));
        if (rn.ec != std::errc{} || !v) throw Error(ErrorCode::IoError, path.string() + ": malformed row");
        if (first) run.start_index = n;
        first = false;
        run.chi.push_back(*v);
    }
    return run;
}

// ---------------------------------------------------------------------------
// Law reconstruction
// ---------------------------------------------------------------------------

inline std::string classification_csv(const Classification& cls) {
    std::string out = "value,label,rule,occurrences,first_index,count_single,count_pair,count_triple,h_single,h_cond_1,"
                      "h_cond_2,anchor_windows,witness_windows\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& vc : cls.entries()) {
        const auto& e = vc.evidence;
        out += format_double(vc.value) + ',' + std::string(to_string(vc.label)) + ",\"" + e.rule + "\"," +
               std::to_string(e.occurrences) + ',' + std::to_string(e.first_index) + ',';
        if (e.stats) {
            const auto& s = *e.stats;
            out += std::to_string(s.count_single) + ',' + std::to_string(s.count_pair) + ',' +
                   std::to_string(s.count_triple) + ',' + format_double(s.h_single) + ',' + opt(s.h_cond_1) + ',' +
                   opt(s.h_cond_2) + ',';
        } else {
            out += ",,,,,,";
        }
        out += std::to_string(e.anchor_windows) + ',' + std::to_string(e.witness_windows) + '\n';
    }
    return out;
}

inline std::string samples_csv(std::span<const double> values) {
    std::string out = "value\n";
    for (double v : values) out += format_double(v) + '\n';
    return out;
}

inline nlohmann::json law_distance_json(const LawDistance& d) {
    return {{"ks", d.ks}, {"wasserstein1", d.wasserstein1}, {"tv_atoms", d.tv_atoms}, {"n_samples", d.n_samples}};
}

inline nlohmann::json report_json(const ReconstructionReport& r, const std::string& samples_file) {
    using nlohmann::json;
    json j;
    j["situation"] = to_string(r.situation);
    j["case"] = to_string(r.case_kind);
    json cls = json::array();
    for (const auto& vc : r.classification.entries()) {
        json e = {{"value", vc.value},
                  {"label", std::string(to_string(vc.label))},
                  {"rule", vc.evidence.rule},
                  {"occurrences", vc.evidence.occurrences},
                  {"first_index", vc.evidence.first_index}};
        if (vc.evidence.stats) {
            const auto& s = *vc.evidence.stats;
            e["h_single"] = s.h_single;
            e["h_double"] = s.h_double;
            e["h_triple"] = s.h_triple;
            if (s.h_cond_1) e["h_cond_1"] = *s.h_cond_1;
            if (s.h_cond_2) e["h_cond_2"] = *s.h_cond_2;
        }
        if (vc.evidence.anchor_windows > 0) {
            e["anchor_windows"] = vc.evidence.anchor_windows;
            e["witness_windows"] = vc.evidence.witness_windows;
        }
        if (vc.evidence.standard_error > 0.0) e["standard_error"] = vc.evidence.standard_error;
        cls.push_back(std::move(e));
    }
    j["classification"] = std::move(cls);
    j["values_seen_once"] = r.classification.singletons;
    json atoms = json::array();
    for (const auto& a : r.estimated_atoms) atoms.push_back({{"value", a.value}, {"weight", a.weight}});
    j["estimated_atoms"] = std::move(atoms);
    j["estimated_samples_file"] = samples_file;
    j["recurrence"] = to_string(r.recurrence);
    json diag = json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = v;
    j["diagnostics"] = std::move(diag);
    if (r.crossing) {
        j["straight_crossing"] = {{"beta2_hat", r.crossing->beta2_hat},
                                  {"hits", r.crossing->m_hits},
                                  {"straight", r.crossing->m_straight},
                                  {"ratio", r.crossing->ratio},
                                  {"clamped", r.crossing->clamped},
                                  {"segments", r.crossing->segments}};
    }
    return j;
}

// ---------------------------------------------------------------------------
// Environment reconstruction
// ---------------------------------------------------------------------------

inline std::string environment_csv(const ReconstructedEnvironment& env, const std::optional<AlignResult>& align) {
    std::string out = "#anchor_value=" + format_double(env.anchor_value) +
                      ",anchor_offset=" + std::to_string(env.anchor_index) +
                      ",oriented=" + (env.oriented ? "true" : "false");
    if (align)
        out += ",best_shift=" + std::to_string(align->best_shift) + ",match_length=" +
               std::to_string(align->match_length) + ",exact=" + (align->exact ? "true" : "false");
    out += align ? "\noffset,value,true_site\n" : "\noffset,value\n";
    for (std::size_t i = 0; i < env.values.size(); ++i) {
        out += std::to_string(i) + ',' + format_double(env.values[i]);
        if (align) out += ',' + std::to_string(align->best_shift + static_cast<std::int64_t>(i));
        out += '\n';
    }
    return out;
}

inline ReconstructedEnvironment read_environment_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    ReconstructedEnvironment env;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        if (line.front() == '#') {
            line.remove_prefix(1);
            while (!line.empty()) {
                const auto comma = line.find(',');
                const auto item = line.substr(0, comma);
                const auto eq = item.find('=');
                const auto key = item.substr(0, eq), val = item.substr(eq + 1);
                if (key == "anchor_value") env.anchor_value = parse_double(val).value_or(0.0);
                else if (key == "anchor_offset") std::from_chars(val.data(), val.data() + val.size(), env.anchor_index);
                else if (key == "oriented") env.oriented = val == "true";
                if (comma == std::string_view::npos) break;
                line.remove_prefix(comma + 1);
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        if (c2 == std::string_view::npos) c2 = line.size();
        const auto v = parse_double(line.substr(c1 + 1, c2 - c1 - 1));
        if (!v) throw Error(ErrorCode::IoError, path.string() + ": malformed row");
        env.values.push_back(*v);
    }
    return env;
}

} // namespace rwre::io
