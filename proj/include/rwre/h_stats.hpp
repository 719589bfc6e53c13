#pragma once

// Long-run repeat frequencies of a value in the observation stream.
//
// Site streams (index 0..L-1, L = n+1):
//   h_single = #{k : chi(k) = a} / L
//   h_double = #{1 <= k <= L-1 : chi(k-1) = chi(k) = a} / (L-1)
//   h_triple = #{1 <= k <= L-2 : chi(k-1) = chi(k) = chi(k+1) = a} / (L-1)
// Bond streams (entries chi(1..n) stored at 0..L-1) average over the first L-1
// entries, matching the (n-1)-normalized sums:
//   h_single = #{0 <= k <= L-2 : chi(k) = a} / (L-1)
//   h_double = #{0 <= k <= L-2 : chi(k) = chi(k+1) = a} / (L-1)
// Conditionals are ratios of the underlying counts:
//   h_cond_1 = pairs / singles, h_cond_2 = triples / pairs.

#include "rwre/distribution.hpp"
#include "rwre/stream_index.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rwre {

struct HStats {
    double value = 0.0;
    double h_single = 0.0;
    double h_double = 0.0;
    double h_triple = 0.0;
    std::optional<double> h_cond_1; ///< absent when the value never occurs
    std::optional<double> h_cond_2; ///< absent when no double occurs
    std::size_t length = 0;         ///< stream length L
    std::size_t count_single = 0;
    std::size_t count_pair = 0;
    std::size_t count_triple = 0;
};

namespace detail {

struct RepeatCounts {
    std::size_t single = 0;
    std::size_t pair = 0;
    std::size_t triple = 0;
};

inline HStats finish_stats(double value, const RepeatCounts& c, std::size_t length, Situation situation) {
    HStats s;
    s.value = value;
    s.length = length;
    s.count_single = c.single;
    s.count_pair = c.pair;
    s.count_triple = c.triple;
    if (length >= 2) {
        const double denom = static_cast<double>(length - 1);
        s.h_single = static_cast<double>(c.single) /
                     (situation == Situation::Site ? static_cast<double>(length) : denom);
        s.h_double = static_cast<double>(c.pair) / denom;
        s.h_triple = static_cast<double>(c.triple) / denom;
    }
    if (c.single > 0) s.h_cond_1 = static_cast<double>(c.pair) / static_cast<double>(c.single);
    if (c.pair > 0) s.h_cond_2 = static_cast<double>(c.triple) / static_cast<double>(c.pair);
    return s;
}

// Counts for every id flagged in `wanted` in one pass.
inline std::vector<RepeatCounts> repeat_counts(const IndexedStream& s, const std::vector<std::uint8_t>& wanted,
                                               Situation situation) {
    std::vector<RepeatCounts> out(s.distinct());
    const auto& ids = s.ids();
    const std::size_t L = ids.size();
    if (situation == Situation::Site) {
        for (std::size_t k = 0; k < L; ++k) {
            const auto a = ids[k];
            if (!wanted[a]) continue;
            ++out[a].single;
            if (k >= 1 && ids[k - 1] == a) {
                ++out[a].pair;
                if (k + 1 < L && ids[k + 1] == a) ++out[a].triple;
            }
        }
    } else {
        for (std::size_t k = 0; k + 1 < L; ++k) {
            const auto a = ids[k];
            if (!wanted[a]) continue;
            ++out[a].single;
            if (ids[k + 1] == a) {
                ++out[a].pair;
                if (k + 2 < L && ids[k + 2] == a) ++out[a].triple;
            }
        }
    }
    return out;
}

inline HStats single_value_stats(std::span<const double> chi, double alpha, Situation situation) {
    RepeatCounts c;
    const std::size_t L = chi.size();
    auto is = [&](std::size_t k) { return same_value(chi[k], alpha); };
    if (situation == Situation::Site) {
        for (std::size_t k = 0; k < L; ++k) {
            if (!is(k)) continue;
            ++c.single;
            if (k >= 1 && is(k - 1)) {
                ++c.pair;
                if (k + 1 < L && is(k + 1)) ++c.triple;
            }
        }
    } else {
        for (std::size_t k = 0; k + 1 < L; ++k) {
            if (!is(k)) continue;
            ++c.single;
            if (is(k + 1)) {
                ++c.pair;
                if (k + 2 < L && is(k + 2)) ++c.triple;
            }
        }
    }
    return finish_stats(alpha, c, L, situation);
}

} // namespace detail

inline HStats h_stats_site(std::span<const double> chi, double alpha) {
    return detail::single_value_stats(chi, alpha, Situation::Site);
}

inline HStats h_stats_bond(std::span<const double> chi, double alpha) {
    return detail::single_value_stats(chi, alpha, Situation::Bond);
}

/// Statistics for several values at once (one pass), in the order given.
inline std::vector<HStats> h_stats_batch(const IndexedStream& s, std::span<const double> alphas, Situation situation) {
    std::vector<std::uint8_t> wanted(s.distinct(), 0);
    for (double a : alphas)
        if (auto id = s.find(a)) wanted[*id] = 1;
    const auto counts = detail::repeat_counts(s, wanted, situation);
    std::vector<HStats> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        const auto id = s.find(a);
        out.push_back(detail::finish_stats(a, id ? counts[*id] : detail::RepeatCounts{}, s.size(), situation));
    }
    return out;
}

} // namespace rwre
