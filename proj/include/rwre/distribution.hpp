#pragma once

// Environment and noise laws: finite mixtures of point masses and uniform
// densities, with validation against the ellipticity bounds and the summary
// statistics the reconstruction relies on.

#include "rwre/error.hpp"
#include "rwre/values.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace rwre {

/// Site randomness (Sinai's walk) or bond randomness (random conductances).
enum class Situation { Site, Bond };

inline std::string to_string(Situation s) { return s == Situation::Site ? "site" : "bond"; }

struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

/// Uniform density on (lower, upper) carrying total mass `weight`.
struct UniformPiece {
    double lower = 0.0;
    double upper = 0.0;
    double weight = 0.0;
};

/// A mixture law for the environment (rho) or the noise (nu).
///
/// `support_bound` is kappa for Site (support inside (kappa, 1-kappa)) and D for
/// Bond (support inside (D, 1/D)). A Site bound of 0 means the open unit interval.
struct DistributionSpec {
    Situation situation = Situation::Site;
    std::vector<Atom> atoms;
    std::vector<UniformPiece> pieces;
    double support_bound = 0.0;

    [[nodiscard]] std::pair<double, double> support_interval() const {
        if (situation == Situation::Site) return {support_bound, 1.0 - support_bound};
        return {support_bound, 1.0 / support_bound};
    }

    [[nodiscard]] double atomic_mass() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.weight;
        return m;
    }

    [[nodiscard]] double continuous_mass() const {
        double m = 0.0;
        for (const auto& p : pieces) m += p.weight;
        return m;
    }

    [[nodiscard]] bool has_continuous_part() const {
        return std::any_of(pieces.begin(), pieces.end(), [](const UniformPiece& p) { return p.weight > 0.0; });
    }

    [[nodiscard]] bool purely_atomic() const { return !has_continuous_part(); }

    /// Mass of the atom at exactly `v` (bit equality), 0 if none.
    [[nodiscard]] double atom_weight(double v) const {
        for (const auto& a : atoms)
            if (same_value(a.value, v)) return a.weight;
        return 0.0;
    }

    [[nodiscard]] ValueSet atom_values() const {
        ValueSet s;
        for (const auto& a : atoms) s.insert(a.value);
        return s;
    }

    /// True if `v` is an atom or lies inside one of the continuous pieces.
    [[nodiscard]] bool in_support(double v) const {
        if (atom_weight(v) > 0.0) return true;
        return std::any_of(pieces.begin(), pieces.end(),
                           [v](const UniformPiece& p) { return p.weight > 0.0 && v > p.lower && v < p.upper; });
    }

    /// F(x) = P(omega <= x).
    [[nodiscard]] double cdf(double x) const {
        double f = 0.0;
        for (const auto& a : atoms)
            if (a.value <= x) f += a.weight;
        for (const auto& p : pieces) f += p.weight * std::clamp((x - p.lower) / (p.upper - p.lower), 0.0, 1.0);
        return f;
    }

    /// F(x-) = P(omega < x).
    [[nodiscard]] double cdf_left(double x) const {
        double f = 0.0;
        for (const auto& a : atoms)
            if (a.value < x) f += a.weight;
        for (const auto& p : pieces) f += p.weight * std::clamp((x - p.lower) / (p.upper - p.lower), 0.0, 1.0);
        return f;
    }

    /// The continuous part renormalized to a probability law (pieces only).
    [[nodiscard]] DistributionSpec continuous_part() const {
        DistributionSpec out{situation, {}, {}, support_bound};
        const double m = continuous_mass();
        RWRE_REQUIRE(m > 0.0, ErrorCode::EmptySample, "law has no continuous part");
        for (const auto& p : pieces) out.pieces.push_back({p.lower, p.upper, p.weight / m});
        return out;
    }

    /// The atomic part renormalized to a probability law.
    [[nodiscard]] DistributionSpec atomic_part() const {
        DistributionSpec out{situation, {}, {}, support_bound};
        const double m = atomic_mass();
        RWRE_REQUIRE(m > 0.0, ErrorCode::EmptySample, "law has no atoms");
        for (const auto& a : atoms) out.atoms.push_back({a.value, a.weight / m});
        return out;
    }

    /// Draw from the mixture given two independent uniforms in (0,1): the first
    /// selects the component (atoms in order, then pieces), the second places
    /// the value inside a uniform piece.
    [[nodiscard]] double sample(double u_component, double u_value) const {
        const std::size_t n_comp = atoms.size() + pieces.size();
        double acc = 0.0;
        for (std::size_t i = 0; i < n_comp; ++i) {
            const bool is_atom = i < atoms.size();
            const double w = is_atom ? atoms[i].weight : pieces[i - atoms.size()].weight;
            acc += w;
            if (w > 0.0 && (u_component < acc || i + 1 == n_comp)) {
                if (is_atom) return atoms[i].value;
                return sample_piece(pieces[i - atoms.size()], u_value);
            }
        }
        // Rounding left u_component above the total; take the last positive component.
        for (std::size_t i = n_comp; i-- > 0;) {
            const bool is_atom = i < atoms.size();
            if (is_atom && atoms[i].weight > 0.0) return atoms[i].value;
            if (!is_atom && pieces[i - atoms.size()].weight > 0.0) return sample_piece(pieces[i - atoms.size()], u_value);
        }
        throw Error(ErrorCode::WeightSumError, "cannot sample from a law without mass");
    }

    /// E f(omega): exact sum over atoms, adaptive Gauss-Kronrod over the pieces.
    [[nodiscard]] double expectation(const std::function<double(double)>& f) const {
        double e = 0.0;
        for (const auto& a : atoms) e += a.weight * f(a.value);
        for (const auto& p : pieces) {
            if (p.weight == 0.0) continue;
            const double integral =
                boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, p.lower, p.upper, 15, 1e-14);
            e += p.weight * integral / (p.upper - p.lower);
        }
        return e;
    }

private:
    static double sample_piece(const UniformPiece& p, double u) {
        double v = p.lower + u * (p.upper - p.lower);
        if (v <= p.lower) v = std::nextafter(p.lower, p.upper);
        if (v >= p.upper) v = std::nextafter(p.upper, p.lower);
        return v;
    }
};

struct DistributionStats {
    double mean = 0.0;          ///< E omega(0)
    double z_norm = 0.0;        ///< Z = 2 E omega(0); Bond only, 0 for Site
    double log_odds_mean = 0.0; ///< E log(omega/(1-omega)); Site only
    double log_odds_var = 0.0;  ///< variance of the log-odds (sigma^2); Site only
};

namespace detail {

inline std::string fmt_value(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace detail

/// Checks the standing assumptions on a law; returns it unchanged when valid.
inline const DistributionSpec& validate_spec(const DistributionSpec& spec) {
    if (spec.situation == Situation::Site) {
        RWRE_REQUIRE(spec.support_bound >= 0.0 && spec.support_bound < 0.5, ErrorCode::SupportViolation,
                     "kappa must lie in [0, 1/2), got " + detail::fmt_value(spec.support_bound));
    } else {
        RWRE_REQUIRE(spec.support_bound > 0.0 && spec.support_bound < 1.0, ErrorCode::SupportViolation,
                     "uniform ellipticity needs D in (0,1), got " + detail::fmt_value(spec.support_bound));
    }
    const auto [lo, hi] = spec.support_interval();
    const std::string interval = "(" + detail::fmt_value(lo) + ", " + detail::fmt_value(hi) + ")";

    double total = 0.0;
    for (const auto& a : spec.atoms) {
        RWRE_REQUIRE(std::isfinite(a.value) && std::isfinite(a.weight) && a.weight >= 0.0 && a.weight <= 1.0,
                     ErrorCode::WeightSumError, "atom weight must lie in [0,1]");
        RWRE_REQUIRE(a.value > lo && a.value < hi, ErrorCode::SupportViolation,
                     "atom " + detail::fmt_value(a.value) + " outside " + interval);
        total += a.weight;
    }
    for (std::size_t i = 0; i < spec.atoms.size(); ++i)
        for (std::size_t j = i + 1; j < spec.atoms.size(); ++j)
            RWRE_REQUIRE(!same_value(spec.atoms[i].value, spec.atoms[j].value), ErrorCode::DuplicateAtom,
                         "atom " + detail::fmt_value(spec.atoms[i].value) + " listed twice");
    for (const auto& p : spec.pieces) {
        RWRE_REQUIRE(std::isfinite(p.weight) && p.weight >= 0.0 && p.weight <= 1.0, ErrorCode::WeightSumError,
                     "piece weight must lie in [0,1]");
        RWRE_REQUIRE(std::isfinite(p.lower) && std::isfinite(p.upper) && p.lower < p.upper, ErrorCode::InvalidPiece,
                     "uniform piece needs lower < upper");
        RWRE_REQUIRE(p.lower >= lo && p.upper <= hi, ErrorCode::SupportViolation,
                     "piece (" + detail::fmt_value(p.lower) + ", " + detail::fmt_value(p.upper) + ") outside " + interval);
        total += p.weight;
    }
    RWRE_REQUIRE(std::abs(total - 1.0) <= 1e-12, ErrorCode::WeightSumError,
                 "weights sum to " + detail::fmt_value(total) + ", expected 1");
    return spec;
}

namespace detail {

inline double log_odds(double v) { return std::log(v) - std::log1p(-v); }

// Antiderivative of log(x/(1-x)).
inline double log_odds_primitive(double x) { return x * std::log(x) + (1.0 - x) * std::log1p(-x); }

} // namespace detail

inline DistributionStats compute_stats(const DistributionSpec& spec) {
    DistributionStats s;
    for (const auto& a : spec.atoms) s.mean += a.weight * a.value;
    for (const auto& p : spec.pieces) s.mean += p.weight * 0.5 * (p.lower + p.upper);

    if (spec.situation == Situation::Bond) {
        s.z_norm = 2.0 * s.mean;
        return s;
    }

    double first = 0.0;
    for (const auto& a : spec.atoms) first += a.weight * detail::log_odds(a.value);
    for (const auto& p : spec.pieces) {
        if (p.weight == 0.0) continue;
        first += p.weight * (detail::log_odds_primitive(p.upper) - detail::log_odds_primitive(p.lower)) /
                 (p.upper - p.lower);
    }
    const double second = spec.expectation([](double x) {
        const double l = detail::log_odds(x);
        return l * l;
    });
    s.log_odds_mean = first;
    s.log_odds_var = std::max(0.0, second - first * first);
    return s;
}

/// Recurrence of the site-random walk: zero mean log-odds, non-degenerate law.
inline bool check_recurrent_site(const DistributionStats& stats, double tol = 1e-9) {
    return std::abs(stats.log_odds_mean) <= tol && stats.log_odds_var > 0.0;
}

/// Mixes a Site law with its image under omega -> 1 - omega, half weight each.
///
/// Reflected atoms or pieces that land within 1e-12 of an existing one are merged
/// into it, so applying symmetrize twice returns the same measure.
inline DistributionSpec symmetrize(const DistributionSpec& spec) {
    RWRE_REQUIRE(spec.situation == Situation::Site, ErrorCode::PreconditionViolation,
                 "symmetrize applies to site laws only");
    constexpr double tol = 1e-12;
    DistributionSpec out{spec.situation, {}, {}, spec.support_bound};

    auto add_atom = [&](double v, double w) {
        for (auto& a : out.atoms) {
            if (std::abs(a.value - v) <= tol) {
                a.weight += w;
                return;
            }
        }
        out.atoms.push_back({v, w});
    };
    auto add_piece = [&](double lo, double hi, double w) {
        for (auto& p : out.pieces) {
            if (std::abs(p.lower - lo) <= tol && std::abs(p.upper - hi) <= tol) {
                p.weight += w;
                return;
            }
        }
        out.pieces.push_back({lo, hi, w});
    };

    // Originals first so that their bit patterns win any merge.
    for (const auto& a : spec.atoms) add_atom(a.value, 0.5 * a.weight);
    for (const auto& p : spec.pieces) add_piece(p.lower, p.upper, 0.5 * p.weight);
    for (const auto& a : spec.atoms) add_atom(1.0 - a.value, 0.5 * a.weight);
    for (const auto& p : spec.pieces) add_piece(1.0 - p.upper, 1.0 - p.lower, 0.5 * p.weight);

    const auto [lo, hi] = out.support_interval();
    for (const auto& a : out.atoms)
        RWRE_REQUIRE(a.value > lo && a.value < hi, ErrorCode::SupportViolation,
                     "reflected atom " + detail::fmt_value(a.value) + " leaves the support");
    for (const auto& p : out.pieces)
        RWRE_REQUIRE(p.lower >= lo && p.upper <= hi, ErrorCode::SupportViolation,
                     "reflected piece leaves the support");
    return out;
}

} // namespace rwre
