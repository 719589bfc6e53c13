#pragma once

// Reconstruction of the environment up to translation.
//
// Non-atomic environment values sit at a.s. unique places. Between two such
// values w1, w2 the shortest observed string from w1 to w2 is a direct
// traversal of the environment in between; strings with an interior value
// that is not labelled as an environment value are corrupted and dropped. The
// piece is grown from one anchor to the right and then to the left, and its
// orientation is fixed from the direction the walk prefers at a site where
// the two sides differ.

#include "rwre/classification.hpp"
#include "rwre/distribution.hpp"
#include "rwre/environment.hpp"
#include "rwre/error.hpp"
#include "rwre/stream_index.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rwre {

struct CrossingString {
    std::size_t start_index = 0;
    std::vector<double> values;
    double left_value = 0.0;
    double right_value = 0.0;
    bool clean = false;

    [[nodiscard]] std::size_t length() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

struct OrientationEvidence {
    std::int64_t site_offset = -1; ///< piece index of the site with the most votes
    std::size_t consistent = 0;    ///< next steps agreeing with the current order
    std::size_t contradicting = 0;
    std::size_t sites = 0;         ///< sites that took part in the vote
};

struct ReconstructedEnvironment {
    std::vector<double> values;
    double anchor_value = 0.0;
    std::size_t anchor_index = 0;
    bool oriented = false;
    OrientationEvidence orientation;
    std::vector<std::string> anomalies;
    std::size_t steps_accepted = 0;
    std::size_t steps_discarded = 0;
};

struct AlignResult {
    std::int64_t best_shift = 0;
    std::size_t match_length = 0;
    bool exact = false;
};

struct AssembleOptions {
    std::size_t max_extent = 64; ///< values per side of the anchor
    std::size_t window = 32;     ///< look-ahead used to propose the next anchor
    bool filter = true;          ///< drop strings with non-environment interior values
};

// ---------------------------------------------------------------------------
// Shortest crossings
// ---------------------------------------------------------------------------

namespace detail {

// Start positions n of the minimal-length strings w1 ... w2 given the sorted
// occurrence lists of both values; returns the minimal length alongside.
inline std::pair<std::size_t, std::vector<std::size_t>> minimal_crossings(std::span<const std::uint32_t> occ1,
                                                                          std::span<const std::uint32_t> occ2) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> starts;
    std::size_t j = 0;
    for (std::uint32_t n : occ1) {
        while (j < occ2.size() && occ2[j] <= n) ++j;
        if (j == occ2.size()) break;
        const std::size_t l = occ2[j] - n;
        if (l < best) {
            best = l;
            starts.clear();
        }
        if (l == best) starts.push_back(n);
    }
    return {best, std::move(starts)};
}

inline std::vector<CrossingString> make_strings(std::span<const double> chi, std::size_t l,
                                                std::span<const std::size_t> starts) {
    std::vector<CrossingString> out;
    out.reserve(starts.size());
    for (std::size_t n : starts) {
        CrossingString cs;
        cs.start_index = n;
        cs.values.assign(chi.begin() + static_cast<std::ptrdiff_t>(n),
                         chi.begin() + static_cast<std::ptrdiff_t>(n + l + 1));
        cs.left_value = cs.values.front();
        cs.right_value = cs.values.back();
        out.push_back(std::move(cs));
    }
    return out;
}

} // namespace detail

/// Every string chi(n..n+l) with chi(n) = w1, chi(n+l) = w2 and l minimal over
/// all such index pairs.
inline std::vector<CrossingString> shortest_crossings(std::span<const double> chi, double w1, double w2) {
    RWRE_REQUIRE(!same_value(w1, w2), ErrorCode::PreconditionViolation, "crossing endpoints must differ");
    std::vector<std::uint32_t> occ1, occ2;
    for (std::size_t k = 0; k < chi.size(); ++k) {
        if (same_value(chi[k], w1)) occ1.push_back(static_cast<std::uint32_t>(k));
        else if (same_value(chi[k], w2)) occ2.push_back(static_cast<std::uint32_t>(k));
    }
    auto [l, starts] = detail::minimal_crossings(occ1, occ2);
    RWRE_REQUIRE(!starts.empty(), ErrorCode::NoCrossing, "the second value never follows the first");
    return detail::make_strings(chi, l, starts);
}

/// Keeps the strings whose interior values are all labelled as environment values.
inline std::vector<CrossingString> filter_clean(std::vector<CrossingString> strings, const Classification& cls) {
    std::vector<CrossingString> out;
    for (auto& cs : strings) {
        cs.clean = true;
        for (std::size_t i = 1; i + 1 < cs.values.size(); ++i)
            if (!cls.is_clean(cs.values[i])) {
                cs.clean = false;
                break;
            }
        if (cs.clean) out.push_back(std::move(cs));
    }
    RWRE_REQUIRE(!out.empty(), ErrorCode::AllCorrupted, "every shortest crossing contains a corrupted value");
    return out;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace detail {

class Assembler {
public:
    Assembler(const IndexedStream& s, const Classification& cls, const AssembleOptions& opt)
        : s_(s), cls_(cls), opt_(opt), chi_(s.chi()) {
        for (double v : cls.ordered(Label::RhoContinuous))
            if (auto id = s.find(v)) {
                order_.push_back(*id);
                is_anchor_.emplace(*id, order_.size() - 1);
            }
        const auto& ids = s.ids();
        occ_.resize(order_.size());
        for (std::size_t k = 0; k < ids.size(); ++k)
            if (auto it = is_anchor_.find(ids[k]); it != is_anchor_.end())
                occ_[it->second].push_back(static_cast<std::uint32_t>(k));
    }

    ReconstructedEnvironment run() {
        RWRE_REQUIRE(order_.size() >= 2, ErrorCode::InsufficientAnchors,
                     "fewer than two recurring non-atomic values; increase n_steps");
        for (std::size_t a = 0; a < order_.size(); ++a) {
            piece_.clear();
            in_piece_.clear();
            piece_.push_back(s_.value(order_[a]));
            in_piece_.emplace(order_[a]);
            anchor_ = 0;
            if (!extend(true)) continue;
            while (right_count() < opt_.max_extent && extend(true)) {}
            while (left_count() < opt_.max_extent && extend(false)) {}
            return finish();
        }
        throw Error(ErrorCode::InsufficientAnchors, "no pair of anchors has a clean shortest crossing; increase n_steps");
    }

private:
    using Id = IndexedStream::Id;

    std::size_t right_count() const { return piece_.size() - 1 - anchor_; }
    std::size_t left_count() const { return anchor_; }

    // Anchor slots (indices into order_) seen within the window after (forward)
    // or before each occurrence of `from`, excluding the piece; sorted by the
    // smallest gap, then by first appearance.
    std::vector<std::size_t> propose(std::size_t from, bool forward) const {
        std::unordered_map<std::size_t, std::size_t> gap;
        const auto& ids = s_.ids();
        for (std::uint32_t n : occ_[from]) {
            for (std::size_t d = 1; d <= opt_.window; ++d) {
                if (forward ? n + d >= ids.size() : d > n) break;
                const Id id = ids[forward ? n + d : n - d];
                auto it = is_anchor_.find(id);
                if (it == is_anchor_.end() || in_piece_.contains(id)) continue;
                auto [g, inserted] = gap.try_emplace(it->second, d);
                if (!inserted) g->second = std::min(g->second, d);
            }
        }
        std::vector<std::size_t> out;
        for (const auto& kv : gap) out.push_back(kv.first);
        std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(gap.at(a), a) < std::tie(gap.at(b), b);
        });
        return out;
    }

    // One reconstruction step on the given side; false when no candidate works.
    bool extend(bool right) {
        const Id end_id = *s_.find(right ? piece_.back() : piece_.front());
        const std::size_t end_slot = is_anchor_.at(end_id);
        for (std::size_t cand : propose(end_slot, right)) {
            const std::size_t from = right ? end_slot : cand;
            const std::size_t to = right ? cand : end_slot;
            auto strings = crossings_both_ways(from, to);
            if (strings.empty()) continue;
            if (opt_.filter) {
                try {
                    strings = filter_clean(std::move(strings), cls_);
                } catch (const Error&) {
                    ++discarded_;
                    continue;
                }
            }
            // strings passing back through the piece are not next-neighbour steps
            std::erase_if(strings, [&](const CrossingString& cs) { return !acceptable(cs.values, right); });
            if (strings.empty()) {
                ++discarded_;
                continue;
            }
            if (!consistent(strings)) continue;
            const auto& vals = strings.front().values;
            if (right) {
                for (std::size_t i = 1; i < vals.size(); ++i) add(vals[i], true);
            } else {
                for (std::size_t i = vals.size() - 1; i-- > 0;) add(vals[i], false);
            }
            ++accepted_;
            return true;
        }
        return false;
    }

    // Shortest crossings from -> to, together with the reversed shortest
    // crossings to -> from when those are no longer. Both read the same
    // segment, and using either direction makes a backtracking path over
    // repeated atoms less likely to pass for the shortest one at finite n.
    std::vector<CrossingString> crossings_both_ways(std::size_t from, std::size_t to) const {
        auto [lf, sf] = minimal_crossings(occ_[from], occ_[to]);
        auto [lb, sb] = minimal_crossings(occ_[to], occ_[from]);
        std::vector<CrossingString> out;
        if (!sf.empty() && (sb.empty() || lf <= lb)) out = make_strings(chi_, lf, sf);
        if (!sb.empty() && (sf.empty() || lb <= lf)) {
            for (auto& cs : make_strings(chi_, lb, sb)) {
                std::reverse(cs.values.begin(), cs.values.end());
                std::swap(cs.left_value, cs.right_value);
                out.push_back(std::move(cs));
            }
        }
        return out;
    }

    bool consistent(const std::vector<CrossingString>& strings) {
        const auto& ref = strings.front().values;
        for (const auto& cs : strings) {
            bool same = cs.values.size() == ref.size();
            for (std::size_t i = 0; same && i < ref.size(); ++i) same = same_value(cs.values[i], ref[i]);
            if (!same) {
                anomalies_.push_back("distinct clean shortest crossings of length " + std::to_string(ref.size() - 1) +
                                     " starting at " + std::to_string(strings.front().start_index) + " and " +
                                     std::to_string(cs.start_index) + "; step discarded");
                ++discarded_;
                return false;
            }
        }
        return true;
    }

    // The new part must not revisit the piece and must not repeat a unique value.
    bool acceptable(const std::vector<double>& vals, bool right) const {
        std::unordered_map<Id, int> seen;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const Id id = *s_.find(vals[i]);
            if (!is_anchor_.contains(id)) continue;
            if (++seen[id] > 1) return false;
            const bool joint = right ? i == 0 : i + 1 == vals.size();
            if (!joint && in_piece_.contains(id)) return false;
        }
        return true;
    }

    void add(double v, bool right) {
        if (right) {
            piece_.push_back(v);
        } else {
            piece_.insert(piece_.begin(), v);
            ++anchor_;
        }
        const Id id = *s_.find(v);
        if (is_anchor_.contains(id)) in_piece_.emplace(id);
    }

    ReconstructedEnvironment finish() {
        const std::size_t lo = anchor_ > opt_.max_extent ? anchor_ - opt_.max_extent : 0;
        const std::size_t hi = std::min(piece_.size(), anchor_ + opt_.max_extent + 1);
        ReconstructedEnvironment r;
        r.values.assign(piece_.begin() + static_cast<std::ptrdiff_t>(lo), piece_.begin() + static_cast<std::ptrdiff_t>(hi));
        r.anchor_index = anchor_ - lo;
        r.anchor_value = r.values[r.anchor_index];
        r.anomalies = anomalies_;
        r.steps_accepted = accepted_;
        r.steps_discarded = discarded_;
        return r;
    }

    const IndexedStream& s_;
    const Classification& cls_;
    AssembleOptions opt_;
    std::span<const double> chi_;
    std::vector<Id> order_;                        // non-atomic values, first-appearance order
    std::unordered_map<Id, std::size_t> is_anchor_; // id -> slot in order_
    std::vector<std::vector<std::uint32_t>> occ_;  // per slot, sorted positions
    std::vector<double> piece_;
    std::unordered_set<Id> in_piece_;
    std::size_t anchor_ = 0;
    std::vector<std::string> anomalies_;
    std::size_t accepted_ = 0;
    std::size_t discarded_ = 0;
};

} // namespace detail

inline ReconstructedEnvironment assemble(const IndexedStream& s, const Classification& cls,
                                         const AssembleOptions& opt = {}) {
    return detail::Assembler(s, cls, opt).run();
}

inline ReconstructedEnvironment assemble(std::span<const double> chi, const Classification& cls,
                                         std::size_t max_extent = 64) {
    const IndexedStream s(chi);
    AssembleOptions opt;
    opt.max_extent = max_extent;
    return assemble(s, cls, opt);
}

// ---------------------------------------------------------------------------
// Orientation
// ---------------------------------------------------------------------------

namespace detail {

struct SiteVotes {
    std::size_t right = 0;
    std::size_t left = 0;
    bool right_expected = false; // majority direction if the current order is the true one
};

} // namespace detail

/// Votes on the direction of the piece and reverses it if the majority of
/// clean next steps contradicts the current order. Site: at a value c != 1/2
/// the walk goes right more often iff c > 1/2. Bond: between conductances u
/// (left) and v (right) it goes right more often iff v > u.
inline ReconstructedEnvironment orient(ReconstructedEnvironment recon, const IndexedStream& s,
                                       const Classification& cls, Situation situation) {
    const auto& vals = recon.values;
    const std::size_t m = vals.size();
    // piece index of every unique non-atomic value
    std::unordered_map<IndexedStream::Id, std::size_t> where;
    for (std::size_t i = 0; i < m; ++i)
        if (cls.label_of(vals[i]) == Label::RhoContinuous)
            if (auto id = s.find(vals[i])) where.emplace(*id, i);

    // eligible centers: site index i (Site) or left edge index i (Bond)
    std::unordered_map<std::size_t, detail::SiteVotes> votes;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        if (situation == Situation::Site) {
            const double c = vals[i];
            if (cls.label_of(c) != Label::RhoContinuous || c == 0.5 || same_value(vals[i - 1], vals[i + 1])) continue;
            votes[i].right_expected = c > 0.5;
        } else {
            if (i + 2 >= m) continue;
            const double u = vals[i], v = vals[i + 1];
            if (cls.label_of(u) != Label::RhoContinuous || cls.label_of(v) != Label::RhoContinuous) continue;
            votes[i].right_expected = v > u;
        }
    }
    RWRE_REQUIRE(!votes.empty(), ErrorCode::NoDistinguishingSite, "no site where the walk prefers a direction");

    auto at = [&](std::size_t k) { return s.value(s.id(k)); };
    const auto& ids = s.ids();
    for (std::size_t n = 1; n + 1 < ids.size(); ++n) {
        auto it = where.find(ids[n]);
        if (it == where.end()) continue;
        const std::size_t i = it->second;
        const double next = at(n + 1);
        if (!cls.is_clean(next)) continue;
        if (situation == Situation::Site) {
            auto vt = votes.find(i);
            if (vt == votes.end()) continue;
            if (same_value(next, vals[i + 1])) ++vt->second.right;
            else if (same_value(next, vals[i - 1])) ++vt->second.left;
        } else {
            // arrival between vals[c] and vals[c+1]: (vals[c-1], vals[c]) or (vals[c+2], vals[c+1])
            const double prev = at(n - 1);
            if (!cls.is_clean(prev)) continue;
            std::optional<std::size_t> c;
            if (i >= 1 && same_value(prev, vals[i - 1]) && votes.contains(i)) c = i;
            else if (i >= 1 && i + 1 < m && same_value(prev, vals[i + 1]) && votes.contains(i - 1)) c = i - 1;
            if (!c) continue;
            auto& vt = votes[*c];
            if (same_value(next, vals[*c + 1])) ++vt.right;
            else if (same_value(next, vals[*c])) ++vt.left;
        }
    }

    OrientationEvidence ev;
    std::size_t best = 0;
    for (const auto& [i, vt] : votes) {
        const std::size_t total = vt.right + vt.left;
        if (total == 0) continue;
        ++ev.sites;
        ev.consistent += vt.right_expected ? vt.right : vt.left;
        ev.contradicting += vt.right_expected ? vt.left : vt.right;
        if (total > best || (total == best && static_cast<std::int64_t>(i) < ev.site_offset)) {
            best = total;
            ev.site_offset = static_cast<std::int64_t>(i);
        }
    }
    recon.oriented = ev.consistent != ev.contradicting;
    if (ev.contradicting > ev.consistent) {
        std::reverse(recon.values.begin(), recon.values.end());
        recon.anchor_index = m - 1 - recon.anchor_index;
        if (ev.site_offset >= 0) {
            // the voting site now sits at the mirrored position
            const auto i = static_cast<std::int64_t>(m) - 1 - ev.site_offset;
            ev.site_offset = situation == Situation::Site ? i : i - 1;
        }
        std::swap(ev.consistent, ev.contradicting);
    }
    recon.orientation = ev;
    return recon;
}

inline ReconstructedEnvironment orient(ReconstructedEnvironment recon, std::span<const double> chi,
                                       const Classification& cls, Situation situation) {
    const IndexedStream s(chi);
    return orient(std::move(recon), s, cls, situation);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Best translation of the piece onto the true environment: values[i] is
/// compared with omega(shift + i), and the score is the longest bit-exact run
/// through the anchor.
inline AlignResult align_score(const ReconstructedEnvironment& recon, Environment& env, std::int64_t search_radius) {
    AlignResult best;
    const auto m = static_cast<std::int64_t>(recon.values.size());
    if (m == 0) return best;
    const auto a = static_cast<std::int64_t>(recon.anchor_index);
    for (std::int64_t shift = -search_radius; shift <= search_radius; ++shift) {
        if (!same_value(env.value(shift + a), recon.values[static_cast<std::size_t>(a)])) continue;
        std::int64_t lo = a, hi = a;
        while (lo > 0 && same_value(env.value(shift + lo - 1), recon.values[static_cast<std::size_t>(lo - 1)])) --lo;
        while (hi + 1 < m && same_value(env.value(shift + hi + 1), recon.values[static_cast<std::size_t>(hi + 1)])) ++hi;
        const auto len = static_cast<std::size_t>(hi - lo + 1);
        if (len > best.match_length) {
            best.match_length = len;
            best.best_shift = shift;
        }
    }
    best.exact = best.match_length == recon.values.size();
    return best;
}

} // namespace rwre
