#pragma once

// Reconstruction of the environment law from the corrupted stream alone.
//
// Site streams: values repeated back to back are atom candidates; other values
// are environment realizations if they recur and noise if seen once. Atom
// candidates are split into environment / noise atoms by a pattern test
// anchored at uniquely placed non-atomic values (rho has a continuous part) or
// by the conditional repeat frequency h(a|aa) (rho purely atomic). The law is
// then estimated from observations made right after fresh markers, or, in the
// purely atomic two-atom case, by counting straight first crossings.
//
// Bond streams: atoms are values with a positive long-run frequency; an
// environment atom is read again right after itself more often than its
// overall frequency, a noise atom is not.

#include "rwre/classification.hpp"
#include "rwre/distribution.hpp"
#include "rwre/empirical.hpp"
#include "rwre/error.hpp"
#include "rwre/h_stats.hpp"
#include "rwre/stream_index.hpp"
#include "rwre/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rwre {

enum class CaseKind { Auto, CaseA, CaseB };
enum class CountKind { RhoCount, NuCount };
enum class RecurrenceVerdict { Recurrent, Undetermined };

inline std::string to_string(CaseKind c) {
    switch (c) {
    case CaseKind::Auto: return "auto";
    case CaseKind::CaseA: return "a";
    case CaseKind::CaseB: return "b";
    }
    return "auto";
}

inline std::string to_string(RecurrenceVerdict v) {
    return v == RecurrenceVerdict::Recurrent ? "Recurrent" : "Undetermined";
}

// ---------------------------------------------------------------------------
// Site: atom candidates and non-atomic values
// ---------------------------------------------------------------------------

/// Values read twice in a row: {a : chi(n) = chi(n+1) = a}.
inline ValueSet detect_atom_candidates_site(std::span<const double> chi) {
    ValueSet out;
    for (std::size_t k = 0; k + 1 < chi.size(); ++k)
        if (same_value(chi[k], chi[k + 1])) out.insert(chi[k]);
    return out;
}

namespace detail {

inline std::vector<std::uint8_t> adjacent_repeat_flags(const IndexedStream& s) {
    std::vector<std::uint8_t> f(s.distinct(), 0);
    const auto& ids = s.ids();
    for (std::size_t k = 0; k + 1 < ids.size(); ++k)
        if (ids[k] == ids[k + 1]) f[ids[k]] = 1;
    return f;
}

} // namespace detail

struct NonAtomSplit {
    ValueSet rho_values; ///< recur at least min_repeats times: environment realizations
    ValueSet nu_values;  ///< seen exactly once: noise realizations
};

/// Among values that are not atom candidates, recurring ones come from the
/// environment (the walk is recurrent) and one-off ones from the noise.
inline NonAtomSplit split_nonatom_values(const IndexedStream& s, const ValueSet& candidates, std::size_t min_repeats) {
    RWRE_REQUIRE(min_repeats >= 2, ErrorCode::PreconditionViolation, "min_repeats must be at least 2");
    const auto cand = s.flags(candidates);
    NonAtomSplit out;
    for (IndexedStream::Id id = 0; id < s.distinct(); ++id) {
        if (cand[id]) continue;
        if (s.count(id) >= min_repeats) out.rho_values.insert(s.value(id));
        else if (s.count(id) == 1) out.nu_values.insert(s.value(id));
    }
    return out;
}

inline NonAtomSplit split_nonatom_values(std::span<const double> chi, const ValueSet& candidates,
                                         std::size_t min_repeats = 2) {
    return split_nonatom_values(IndexedStream(chi), candidates, min_repeats);
}

// ---------------------------------------------------------------------------
// Site, rho has a continuous part: anchored pattern test
// ---------------------------------------------------------------------------

struct PatternEvidence {
    std::size_t anchor_windows = 0;
    std::size_t witness_windows = 0;
    Label label = Label::Undecided;
};

/// For every candidate a: look for windows (a0, a1, a, a2) whose other three
/// entries are pairwise distinct environment non-atoms. Such a window pins the
/// walker next to the unique site carrying a1. The candidate is a noise atom
/// iff some (a1, a, a) is also read for one of these a1; without any anchor
/// window the test abstains.
inline std::map<double, PatternEvidence> pattern_test_atoms_site(const IndexedStream& s, const ValueSet& candidates,
                                                                 const ValueSet& rho_nonatoms) {
    const auto cand = s.flags(candidates);
    const auto rho = s.flags(rho_nonatoms);
    const auto& ids = s.ids();
    const std::size_t L = ids.size();

    // anchor_a1[candidate id] = ids that served as a1 in some anchor window
    std::unordered_map<IndexedStream::Id, std::unordered_set<IndexedStream::Id>> anchor_a1;
    std::unordered_map<IndexedStream::Id, std::size_t> anchors;
    for (std::size_t k = 0; k + 3 < L; ++k) {
        const auto a = ids[k + 2];
        if (!cand[a]) continue;
        const auto a0 = ids[k], a1 = ids[k + 1], a2 = ids[k + 3];
        if (!rho[a0] || !rho[a1] || !rho[a2]) continue;
        if (a0 == a1 || a1 == a2 || a0 == a2) continue;
        anchor_a1[a].insert(a1);
        ++anchors[a];
    }
    std::unordered_map<IndexedStream::Id, std::size_t> witnesses;
    for (std::size_t k = 0; k + 2 < L; ++k) {
        const auto a = ids[k + 1];
        if (!cand[a] || ids[k + 2] != a) continue;
        auto it = anchor_a1.find(a);
        if (it != anchor_a1.end() && it->second.contains(ids[k])) ++witnesses[a];
    }

    std::map<double, PatternEvidence> out;
    for (double v : candidates.sorted()) {
        PatternEvidence e;
        if (auto id = s.find(v)) {
            e.anchor_windows = anchors.contains(*id) ? anchors[*id] : 0;
            e.witness_windows = witnesses.contains(*id) ? witnesses[*id] : 0;
        }
        if (e.anchor_windows == 0) e.label = Label::Undecided;
        else e.label = e.witness_windows > 0 ? Label::NuAtom : Label::RhoAtom;
        out.emplace(v, e);
    }
    return out;
}

inline Label pattern_test_atom_site(std::span<const double> chi, double alpha, const ValueSet& rho_nonatoms) {
    const IndexedStream s(chi);
    return pattern_test_atoms_site(s, ValueSet{alpha}, rho_nonatoms).begin()->second.label;
}

// ---------------------------------------------------------------------------
// Markers and fresh observations
// ---------------------------------------------------------------------------

/// Site markers: times n such that chi(n-2), chi(n-1) are non-candidates seen
/// for the first time, and the same ordered pair is read again at some m > n.
inline std::vector<std::size_t> marker_times(const IndexedStream& s, const ValueSet& candidates) {
    const auto cand = s.flags(candidates);
    const auto& ids = s.ids();
    const std::size_t L = ids.size();
    auto pair_key = [](IndexedStream::Id a, IndexedStream::Id b) {
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
    };

    std::unordered_map<std::uint64_t, std::size_t> pending; // pair -> n
    std::vector<std::uint8_t> is_head(s.distinct(), 0);
    for (std::size_t n = 2; n < L; ++n) {
        const auto a = ids[n - 2], b = ids[n - 1];
        if (cand[a] || cand[b] || a == b) continue;
        if (s.first(a) != n - 2 || s.first(b) != n - 1) continue;
        // the pair has to be seen again; both values must recur for that
        if (s.last(a) <= n || s.last(b) <= n) continue;
        pending.emplace(pair_key(a, b), n);
        is_head[a] = 1;
    }
    std::vector<std::uint8_t> confirmed_flag;
    std::vector<std::size_t> out;
    if (pending.empty()) return out;
    std::unordered_set<std::uint64_t> confirmed;
    for (std::size_t m = 0; m + 1 < L; ++m) {
        if (!is_head[ids[m]]) continue;
        const auto key = pair_key(ids[m], ids[m + 1]);
        auto it = pending.find(key);
        if (it != pending.end() && m > it->second) confirmed.insert(key);
    }
    for (const auto& [key, n] : pending)
        if (confirmed.contains(key)) out.push_back(n);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::size_t> marker_times(std::span<const double> chi, const ValueSet& candidates) {
    return marker_times(IndexedStream(chi), candidates);
}

/// Bond markers: times n such that chi(n-1) is a non-atom seen for the first
/// time that is read again at some m > n.
inline std::vector<std::size_t> marker_times_bond(const IndexedStream& s, const ValueSet& candidates) {
    const auto cand = s.flags(candidates);
    const auto& ids = s.ids();
    std::vector<std::size_t> out;
    for (std::size_t n = 1; n < ids.size(); ++n) {
        const auto a = ids[n - 1];
        if (cand[a] || s.first(a) != n - 1) continue;
        if (s.last(a) > n) out.push_back(n);
    }
    return out;
}

inline std::vector<std::size_t> marker_times_bond(std::span<const double> chi, const ValueSet& candidates) {
    return marker_times_bond(IndexedStream(chi), candidates);
}

/// Times n of the observations right after a marker, provided the walk did not
/// step back (chi(n) != chi(n - lag)), the value is not a noise atom, and it
/// recurs later. lag = 2 for Site markers, 1 for Bond markers.
inline std::vector<std::size_t> fresh_observation_times(const IndexedStream& s, std::span<const std::size_t> markers,
                                                        const ValueSet& nu_atoms, std::size_t lag = 2) {
    const auto nu = s.flags(nu_atoms);
    const auto& ids = s.ids();
    std::vector<std::size_t> out;
    for (std::size_t n : markers) {
        if (n < lag || n >= ids.size()) continue;
        const auto c = ids[n];
        if (nu[c] || c == ids[n - lag]) continue;
        if (s.last(c) > n) out.push_back(n);
    }
    return out;
}

inline std::vector<double> fresh_observations(const IndexedStream& s, std::span<const std::size_t> markers,
                                              const ValueSet& nu_atoms, std::size_t lag = 2) {
    std::vector<double> out;
    for (std::size_t n : fresh_observation_times(s, markers, nu_atoms, lag)) out.push_back(s.value(s.id(n)));
    return out;
}

/// Bond markers are left over a conductance u = chi(n-1); the walk then crosses
/// the next fresh edge x = chi(n) with probability x / (u + x), so the fresh
/// observations are size-biased. Weighting each by 1 + u/x undoes that.
inline std::vector<double> size_bias_weights(std::span<const double> chi, std::span<const std::size_t> times) {
    std::vector<double> w;
    w.reserve(times.size());
    for (std::size_t n : times) w.push_back(1.0 + chi[n - 1] / chi[n]);
    return w;
}

inline std::vector<double> fresh_observations(std::span<const double> chi, std::span<const std::size_t> markers,
                                              const ValueSet& nu_atoms, std::size_t lag = 2) {
    return fresh_observations(IndexedStream(chi), markers, nu_atoms, lag);
}

// ---------------------------------------------------------------------------
// Site, rho purely atomic
// ---------------------------------------------------------------------------

/// Decides an atom candidate from h(a|aa): environment atoms satisfy
/// h(a|aa) >= (1-p) kappa > p, noise atoms h(b|bb) = p nu(b) <= p.
///
/// A double without any triple while the value keeps recurring is taken as the
/// degenerate case and labelled RhoAtom. Values whose h(a|aa) lies within
/// se_mult standard errors of p are left Undecided.
inline ValueClass classify_atom_site_pure(const HStats& stats, double p, double kappa, double se_mult = 3.0,
                                          std::size_t min_repeats = 2) {
    RWRE_REQUIRE(p < kappa / (kappa + 1.0), ErrorCode::PreconditionViolation,
                 "needs known p < kappa/(kappa+1)");
    ValueClass vc;
    vc.value = stats.value;
    vc.evidence.rule = "h(a|aa) > p";
    vc.evidence.occurrences = stats.count_single;
    vc.evidence.stats = stats;
    if (stats.count_pair == 0) {
        vc.label = Label::Undecided;
        return vc;
    }
    if (stats.count_triple == 0 && stats.count_single >= min_repeats) {
        vc.evidence.rule = "no triple while recurring";
        vc.label = Label::RhoAtom;
        return vc;
    }
    const double h = *stats.h_cond_2;
    const double se = std::sqrt(std::max(h * (1.0 - h), 0.0) / static_cast<double>(stats.count_pair));
    vc.evidence.standard_error = se;
    if (std::abs(h - p) <= se_mult * se) vc.label = Label::Undecided;
    else vc.label = h > p ? Label::RhoAtom : Label::NuAtom;
    return vc;
}

/// When the number M of environment (or noise) atoms is known: the M largest
/// h(a|aa) are environment atoms (or the M smallest are noise atoms).
inline std::vector<ValueClass> classify_atoms_known_count(std::span<const HStats> all_stats, std::size_t M,
                                                          CountKind which) {
    RWRE_REQUIRE(M >= 1 && M <= all_stats.size(), ErrorCode::PreconditionViolation,
                 "M must lie between 1 and the number of candidates");
    auto key = [](const HStats& s) { return s.h_cond_2.value_or(-1.0); };
    std::vector<std::size_t> order(all_stats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(all_stats[a]) > key(all_stats[b]); });

    // boundary between the top group and the rest
    const std::size_t top = which == CountKind::RhoCount ? M : all_stats.size() - M;
    if (top > 0 && top < order.size())
        RWRE_REQUIRE(key(all_stats[order[top - 1]]) != key(all_stats[order[top]]), ErrorCode::TieAtBoundary,
                     "equal h(a|aa) at the classification boundary");

    std::vector<ValueClass> out(all_stats.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& s = all_stats[order[r]];
        auto& vc = out[order[r]];
        vc.value = s.value;
        vc.label = r < top ? Label::RhoAtom : Label::NuAtom;
        vc.evidence.rule = which == CountKind::RhoCount ? "M largest h(a|aa)" : "M smallest h(a|aa)";
        vc.evidence.occurrences = s.count_single;
        vc.evidence.stats = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Site, two environment atoms: straight first crossings
// ---------------------------------------------------------------------------

struct CrossingCounts {
    std::size_t hits = 0;     ///< intervals hit for the first time with three steps left to observe
    std::size_t straight = 0; ///< of those, crossed in three steps
};

/// Maps one uncorrupted segment to the nearest-neighbour path U on Z colored
/// ...a2 | a1 a1 a2 a2 | a1 a1 ... (psi(4m) = psi(4m+1) = a1,
/// psi(4m+2) = psi(4m+3) = a2), started at a vertex with the color of the
/// first observation, and counts straight first crossings of the intervals
/// [4m+1, 4m+4].
inline CrossingCounts count_straight_crossings(std::span<const double> segment, double alpha1, double alpha2) {
    CrossingCounts c;
    if (segment.empty()) return c;
    auto color = [&](std::int64_t v) {
        const auto r = ((v % 4) + 4) % 4;
        return r < 2 ? alpha1 : alpha2;
    };
    auto interval = [](std::int64_t v) {
        const std::int64_t t = v - 1;
        return t >= 0 ? t / 4 : -((-t + 3) / 4);
    };
    std::vector<std::int64_t> u(segment.size());
    u[0] = same_value(segment[0], alpha1) ? 0 : 2;
    for (std::size_t k = 1; k < segment.size(); ++k) {
        const std::int64_t prev = u[k - 1];
        u[k] = same_value(color(prev - 1), segment[k]) ? prev - 1 : prev + 1;
    }
    std::unordered_set<std::int64_t> seen{interval(u[0])};
    for (std::size_t k = 1; k < segment.size(); ++k) {
        const std::int64_t m = interval(u[k]);
        if (!seen.insert(m).second) continue;
        if (k + 3 >= segment.size()) continue;
        ++c.hits;
        const std::int64_t lo = 4 * m + 1, hi = 4 * m + 4;
        const std::int64_t dir = u[k] == lo ? 1 : -1;
        const std::int64_t far = u[k] == lo ? hi : lo;
        if (u[k + 1] == u[k] + dir && u[k + 2] == u[k] + 2 * dir && u[k + 3] == far) ++c.straight;
    }
    return c;
}

/// Probability that U crosses an interval straight on its first visit, as a
/// function of the second atom a2 and its weight b2.
[[nodiscard]] inline double straight_crossing_probability(double alpha2, double beta2) {
    return (1.0 - alpha2 * (1.0 - alpha2)) * (1.0 - beta2 * beta2);
}

struct StraightCrossingResult {
    double beta2_hat = 0.0;
    std::size_t m_hits = 0;
    std::size_t m_straight = 0;
    double ratio = 0.0;
    bool clamped = false;
    std::size_t segments = 0;
};

/// Estimates the weight of alpha2 from straight first crossings, treating each
/// maximal clean segment (mask = 1, values in {alpha1, alpha2}) independently.
inline StraightCrossingResult straight_crossing_estimator(std::span<const double> chi, double alpha1, double alpha2,
                                                          std::span<const std::uint8_t> clean_mask) {
    RWRE_REQUIRE(clean_mask.size() == chi.size(), ErrorCode::PreconditionViolation, "mask length differs from stream");
    RWRE_REQUIRE(!same_value(alpha1, alpha2), ErrorCode::PreconditionViolation, "the two atoms must differ");
    StraightCrossingResult r;
    auto usable = [&](std::size_t k) {
        return clean_mask[k] && (same_value(chi[k], alpha1) || same_value(chi[k], alpha2));
    };
    for (std::size_t k = 0; k < chi.size();) {
        if (!usable(k)) {
            ++k;
            continue;
        }
        std::size_t j = k;
        while (j < chi.size() && usable(j)) ++j;
        const auto c = count_straight_crossings(chi.subspan(k, j - k), alpha1, alpha2);
        r.m_hits += c.hits;
        r.m_straight += c.straight;
        ++r.segments;
        k = j;
    }
    RWRE_REQUIRE(r.m_hits > 0, ErrorCode::InsufficientHits, "no interval was hit for the first time");
    r.ratio = static_cast<double>(r.m_straight) / static_cast<double>(r.m_hits);
    const double x = 1.0 - r.ratio / (1.0 - alpha2 * (1.0 - alpha2));
    r.clamped = x < 0.0 || x > 1.0;
    r.beta2_hat = std::sqrt(std::clamp(x, 0.0, 1.0));
    return r;
}

// ---------------------------------------------------------------------------
// Bond
// ---------------------------------------------------------------------------

struct BondDetection {
    ValueSet candidates;   ///< h(a) above the floor: atoms of rho + nu
    ValueSet rho_nonatoms; ///< recurring values with h(a) at or below the floor
    ValueSet nu_nonatoms;  ///< values seen once
    double h_floor = 0.0;
};

/// Default floor separating h(a) > 0 from the vanishing frequency of a single
/// edge: an edge is crossed O(sqrt(n)) times in n steps, so its frequency
/// decays like 1/sqrt(n).
[[nodiscard]] inline double default_h_floor(std::size_t length) {
    return length < 2 ? 0.0 : 10.0 / std::sqrt(static_cast<double>(length - 1));
}

inline BondDetection detect_atoms_bond(const IndexedStream& s, double h_floor) {
    BondDetection d;
    d.h_floor = h_floor;
    if (s.size() < 2) return d;
    const double denom = static_cast<double>(s.size() - 1);
    const auto last_id = s.id(s.size() - 1);
    for (IndexedStream::Id id = 0; id < s.distinct(); ++id) {
        // h_single averages over the first L-1 entries
        const std::size_t c = s.count(id) - (id == last_id ? 1 : 0);
        const double h = static_cast<double>(c) / denom;
        if (h > h_floor) d.candidates.insert(s.value(id));
        else if (s.count(id) >= 2) d.rho_nonatoms.insert(s.value(id));
        else d.nu_nonatoms.insert(s.value(id));
    }
    return d;
}

inline BondDetection detect_atoms_bond(std::span<const double> chi, std::optional<double> h_floor = std::nullopt) {
    return detect_atoms_bond(IndexedStream(chi), h_floor.value_or(default_h_floor(chi.size())));
}

/// Environment atom iff h(a|a) exceeds h(a) by more than se_mult binomial
/// standard errors of h(a|a); noise atom iff the two agree within that band.
inline ValueClass classify_atom_bond(const HStats& stats, double se_mult = 3.0, std::size_t min_count = 30) {
    ValueClass vc;
    vc.value = stats.value;
    vc.evidence.rule = "h(a|a) > h(a)";
    vc.evidence.occurrences = stats.count_single;
    vc.evidence.stats = stats;
    if (stats.count_single < min_count || !stats.h_cond_1) {
        vc.label = Label::Undecided;
        return vc;
    }
    const double hc = *stats.h_cond_1;
    const double se = std::sqrt(std::max(hc * (1.0 - hc), 0.0) / static_cast<double>(stats.count_single));
    vc.evidence.standard_error = se;
    const double diff = hc - stats.h_single;
    if (diff > se_mult * se) vc.label = Label::RhoAtom;
    else if (std::abs(diff) <= se_mult * se) vc.label = Label::NuAtom;
    else vc.label = Label::Undecided;
    return vc;
}

/// Purely atomic rho: h(a) = 2(1-p) rho(a) a / Z, so rho(a) is proportional to h(a)/a.
inline EmpiricalMeasure reconstruct_rho_atomic_bond(std::span<const HStats> stats_list, const ValueSet& rho_atoms) {
    std::vector<Atom> w;
    for (const auto& s : stats_list)
        if (rho_atoms.contains(s.value)) w.push_back({s.value, s.h_single / s.value});
    RWRE_REQUIRE(!w.empty(), ErrorCode::EmptySample, "no environment atoms to weigh");
    return normalized_atoms(std::move(w));
}

// ---------------------------------------------------------------------------
// Recurrence
// ---------------------------------------------------------------------------

/// Site streams with a non-atomic environment part: a non-candidate value that
/// recurs is an environment value, and one that keeps recurring witnesses
/// recurrence of the walk. Finite streams can only abstain otherwise.
inline RecurrenceVerdict recurrence_diagnostic(const IndexedStream& s, const ValueSet& candidates,
                                               std::size_t repeat_threshold) {
    const auto cand = s.flags(candidates);
    const std::size_t need = std::max<std::size_t>(2, repeat_threshold);
    for (IndexedStream::Id id = 0; id < s.distinct(); ++id)
        if (!cand[id] && s.count(id) >= need) return RecurrenceVerdict::Recurrent;
    return RecurrenceVerdict::Undetermined;
}

inline RecurrenceVerdict recurrence_diagnostic(std::span<const double> chi, std::size_t repeat_threshold) {
    const IndexedStream s(chi);
    return recurrence_diagnostic(s, detect_atom_candidates_site(chi), repeat_threshold);
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

struct LawConfig {
    Situation situation = Situation::Site;
    CaseKind case_kind = CaseKind::Auto; ///< Auto: CaseA iff some non-candidate value recurs
    std::optional<double> p_known;
    double kappa = 0.0;
    std::optional<std::size_t> M;
    CountKind which = CountKind::RhoCount;
    std::size_t min_repeats = 2;
    std::optional<double> h_floor;
    double se_mult = 3.0;
    std::size_t recurrence_threshold = 10;
    bool classify_noise = true;       ///< false skips every step that separates noise from environment
    bool size_bias_correction = true; ///< Bond case (a): reweight fresh observations
};

struct ReconstructionReport {
    Situation situation = Situation::Site;
    CaseKind case_kind = CaseKind::CaseA;
    Classification classification;
    EmpiricalMeasure estimated;             ///< estimated law of omega(0)
    std::vector<Atom> estimated_atoms;      ///< estimated atom weights
    std::vector<double> fresh_observations; ///< in stream order (case a)
    std::vector<std::size_t> fresh_times;   ///< stream index of each fresh observation
    std::vector<double> fresh_weights;      ///< sampling weight of each fresh observation
    std::vector<double> continuous_samples; ///< fresh observations that are not atoms
    EmpiricalMeasure continuous_estimate;   ///< weighted law of continuous_samples
    std::vector<std::size_t> markers;
    std::optional<StraightCrossingResult> crossing;
    RecurrenceVerdict recurrence = RecurrenceVerdict::Undetermined;
    std::map<std::string, double> diagnostics;
};

namespace detail {

inline void add_nonatoms(Classification& cls, const IndexedStream& s, const ValueSet& rho_values,
                         const ValueSet& candidates, std::size_t min_repeats) {
    const auto cand = s.flags(candidates);
    const auto rho = s.flags(rho_values);
    for (IndexedStream::Id id = 0; id < s.distinct(); ++id) {
        if (cand[id]) continue;
        if (s.count(id) == 1) {
            ++cls.singletons;
            continue;
        }
        ValueClass vc;
        vc.value = s.value(id);
        vc.label = rho[id] ? Label::RhoContinuous : Label::Undecided;
        vc.evidence.rule = "occurs at least " + std::to_string(min_repeats) + " times";
        vc.evidence.occurrences = s.count(id);
        vc.evidence.first_index = s.first(id);
        cls.set(std::move(vc));
    }
}

inline void estimate_from_fresh(ReconstructionReport& r, const ValueSet& candidates) {
    r.diagnostics["fresh_observations"] = static_cast<double>(r.fresh_observations.size());
    if (r.fresh_weights.empty()) r.fresh_weights.assign(r.fresh_observations.size(), 1.0);
    if (r.fresh_observations.empty()) return;
    r.estimated = weighted_law(r.fresh_observations, r.fresh_weights);
    for (const auto& a : r.estimated.atom_weights)
        if (candidates.contains(a.value)) r.estimated_atoms.push_back(a);
    std::vector<double> w;
    for (std::size_t k = 0; k < r.fresh_observations.size(); ++k) {
        if (candidates.contains(r.fresh_observations[k])) continue;
        r.continuous_samples.push_back(r.fresh_observations[k]);
        w.push_back(r.fresh_weights[k]);
    }
    if (!r.continuous_samples.empty()) r.continuous_estimate = weighted_law(r.continuous_samples, w);
}

inline CaseKind resolve_case(CaseKind requested, const ValueSet& rho_nonatoms) {
    if (requested != CaseKind::Auto) return requested;
    return rho_nonatoms.empty() ? CaseKind::CaseB : CaseKind::CaseA;
}

inline ReconstructionReport reconstruct_site(const IndexedStream& s, const LawConfig& cfg) {
    ReconstructionReport r;
    r.situation = Situation::Site;
    const auto chi = s.chi();
    const ValueSet candidates = detect_atom_candidates_site(chi);
    const auto split = split_nonatom_values(s, candidates, cfg.min_repeats);
    r.case_kind = resolve_case(cfg.case_kind, split.rho_values);
    add_nonatoms(r.classification, s, split.rho_values, candidates, cfg.min_repeats);
    r.recurrence = recurrence_diagnostic(s, candidates, cfg.recurrence_threshold);
    if (!cfg.classify_noise) r.classification.unlisted = Label::RhoContinuous;

    const auto cand_sorted = candidates.sorted();
    const auto stats = h_stats_batch(s, cand_sorted, Situation::Site);

    if (r.case_kind == CaseKind::CaseA) {
        std::map<double, PatternEvidence> tests;
        if (cfg.classify_noise) tests = pattern_test_atoms_site(s, candidates, split.rho_values);
        for (std::size_t i = 0; i < cand_sorted.size(); ++i) {
            ValueClass vc;
            vc.value = cand_sorted[i];
            vc.evidence.stats = stats[i];
            vc.evidence.occurrences = stats[i].count_single;
            vc.evidence.first_index = s.first(*s.find(vc.value));
            if (cfg.classify_noise) {
                const auto& e = tests.at(vc.value);
                vc.label = e.label;
                vc.evidence.rule = "anchored pattern (a0,a1,a,a2) / (a1,a,a)";
                vc.evidence.anchor_windows = e.anchor_windows;
                vc.evidence.witness_windows = e.witness_windows;
            } else {
                vc.label = Label::RhoAtom;
                vc.evidence.rule = "noise classification disabled";
            }
            r.classification.set(std::move(vc));
        }
        const ValueSet nu_atoms = r.classification.values_with(Label::NuAtom);
        r.markers = marker_times(s, candidates);
        r.fresh_times = fresh_observation_times(s, r.markers, nu_atoms, 2);
        for (std::size_t n : r.fresh_times) r.fresh_observations.push_back(chi[n]);
        estimate_from_fresh(r, candidates);
    } else {
        std::vector<ValueClass> labels;
        const bool threshold_ok = cfg.p_known && *cfg.p_known < cfg.kappa / (cfg.kappa + 1.0);
        if (!cfg.classify_noise) {
            for (const auto& st : stats) {
                ValueClass vc;
                vc.value = st.value;
                vc.label = Label::RhoAtom;
                vc.evidence.rule = "noise classification disabled";
                vc.evidence.stats = st;
                vc.evidence.occurrences = st.count_single;
                labels.push_back(vc);
            }
        } else if (threshold_ok) {
            for (const auto& st : stats)
                labels.push_back(classify_atom_site_pure(st, *cfg.p_known, cfg.kappa, cfg.se_mult, cfg.min_repeats));
        } else if (cfg.M) {
            labels = classify_atoms_known_count(stats, *cfg.M, cfg.which);
        } else {
            throw Error(ErrorCode::PreconditionViolation,
                        "purely atomic site law needs a known p < kappa/(kappa+1) or a known atom count M");
        }
        for (auto& vc : labels) {
            vc.evidence.first_index = s.first(*s.find(vc.value));
            r.classification.set(std::move(vc));
        }

        const auto rho_atoms = r.classification.ordered(Label::RhoAtom);
        if (rho_atoms.size() == 1) {
            r.estimated = normalized_atoms({{rho_atoms[0], 1.0}});
        } else if (rho_atoms.size() == 2) {
            const auto ids = s.ids();
            const auto rho_flags = s.flags(r.classification.values_with(Label::RhoAtom));
            std::vector<std::uint8_t> mask(ids.size());
            for (std::size_t k = 0; k < ids.size(); ++k) mask[k] = rho_flags[ids[k]];
            // alpha1 is the environment atom seen first
            const auto sc = straight_crossing_estimator(chi, rho_atoms[0], rho_atoms[1], mask);
            r.crossing = sc;
            r.estimated = normalized_atoms({{rho_atoms[0], 1.0 - sc.beta2_hat}, {rho_atoms[1], sc.beta2_hat}});
            r.diagnostics["beta2_hat"] = sc.beta2_hat;
            r.diagnostics["crossing_hits"] = static_cast<double>(sc.m_hits);
            r.diagnostics["crossing_straight"] = static_cast<double>(sc.m_straight);
            r.diagnostics["crossing_clamped"] = sc.clamped ? 1.0 : 0.0;
        } else if (rho_atoms.empty()) {
            throw Error(ErrorCode::EmptySample, "no environment atom was identified");
        } else {
            throw Error(ErrorCode::UnsupportedCase,
                        "law estimation for more than two environment atoms in the site case is not implemented");
        }
        r.estimated_atoms = r.estimated.atom_weights;
    }
    r.diagnostics["candidates"] = static_cast<double>(candidates.size());
    r.diagnostics["markers"] = static_cast<double>(r.markers.size());
    return r;
}

inline ReconstructionReport reconstruct_bond(const IndexedStream& s, const LawConfig& cfg) {
    ReconstructionReport r;
    r.situation = Situation::Bond;
    const double floor = cfg.h_floor.value_or(default_h_floor(s.size()));
    const auto det = detect_atoms_bond(s, floor);
    r.case_kind = resolve_case(cfg.case_kind, det.rho_nonatoms);
    r.diagnostics["h_floor"] = floor;
    add_nonatoms(r.classification, s, det.rho_nonatoms, det.candidates, 2);
    if (!cfg.classify_noise) r.classification.unlisted = Label::RhoContinuous;

    const auto cand_sorted = det.candidates.sorted();
    const auto stats = h_stats_batch(s, cand_sorted, Situation::Bond);
    for (const auto& st : stats) {
        ValueClass vc = cfg.classify_noise ? classify_atom_bond(st, cfg.se_mult) : ValueClass{st.value, Label::RhoAtom, {}};
        if (!cfg.classify_noise) {
            vc.evidence.rule = "noise classification disabled";
            vc.evidence.stats = st;
            vc.evidence.occurrences = st.count_single;
        }
        vc.evidence.first_index = s.first(*s.find(vc.value));
        r.classification.set(std::move(vc));
    }

    if (r.case_kind == CaseKind::CaseA) {
        const ValueSet nu_atoms = r.classification.values_with(Label::NuAtom);
        r.markers = marker_times_bond(s, det.candidates);
        r.fresh_times = fresh_observation_times(s, r.markers, nu_atoms, 1);
        for (std::size_t n : r.fresh_times) r.fresh_observations.push_back(s.chi()[n]);
        if (cfg.size_bias_correction) r.fresh_weights = size_bias_weights(s.chi(), r.fresh_times);
        r.diagnostics["size_bias_correction"] = cfg.size_bias_correction ? 1.0 : 0.0;
        estimate_from_fresh(r, det.candidates);
    } else {
        r.estimated = reconstruct_rho_atomic_bond(stats, r.classification.values_with(Label::RhoAtom));
        r.estimated_atoms = r.estimated.atom_weights;
    }
    r.diagnostics["candidates"] = static_cast<double>(det.candidates.size());
    r.diagnostics["markers"] = static_cast<double>(r.markers.size());
    return r;
}

} // namespace detail

/// Full law pipeline on chi alone (truth, if attached to the run, is ignored).
inline ReconstructionReport reconstruct_law(const IndexedStream& s, const LawConfig& cfg) {
    const auto chi = s.chi();
    ReconstructionReport r =
        cfg.situation == Situation::Site ? detail::reconstruct_site(s, cfg) : detail::reconstruct_bond(s, cfg);
    r.diagnostics["length"] = static_cast<double>(chi.size());
    r.diagnostics["distinct_values"] = static_cast<double>(s.distinct());
    r.diagnostics["singletons"] = static_cast<double>(r.classification.singletons);
    for (Label l : {Label::RhoAtom, Label::NuAtom, Label::RhoContinuous, Label::Undecided})
        r.diagnostics["labels_" + std::string(to_string(l))] = static_cast<double>(r.classification.count(l));
    return r;
}

inline ReconstructionReport reconstruct_law(std::span<const double> chi, const LawConfig& cfg) {
    return reconstruct_law(IndexedStream(chi), cfg);
}

inline ReconstructionReport reconstruct_law(const ObservationRun& run, const LawConfig& cfg) {
    return reconstruct_law(std::span<const double>(run.chi), cfg);
}

} // namespace rwre
