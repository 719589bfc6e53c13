#pragma once

#include "rwre/distribution.hpp"
#include "rwre/error.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace rwre {

/// Weighted point masses, optionally backed by the raw sample list.
///
/// When `atom_weights` is non-empty it defines the measure; otherwise the
/// samples do, each with mass 1/N.
struct EmpiricalMeasure {
    std::vector<double> samples;
    std::vector<Atom> atom_weights; // sorted by value, bit-distinct
    bool normalized = false;

    [[nodiscard]] bool empty() const { return samples.empty() && atom_weights.empty(); }

    /// Point masses of the measure, sorted by value.
    [[nodiscard]] std::vector<Atom> masses() const {
        if (!atom_weights.empty()) return atom_weights;
        return aggregate(samples);
    }

    [[nodiscard]] double weight_of(double v) const {
        for (const auto& a : atom_weights)
            if (same_value(a.value, v)) return a.weight;
        return 0.0;
    }

    [[nodiscard]] double total_weight() const {
        double t = 0.0;
        for (const auto& a : masses()) t += a.weight;
        return t;
    }

    /// Sorted (value, weight) pairs; weights are count / N.
    static std::vector<Atom> aggregate(std::span<const double> values) {
        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<Atom> out;
        const double unit = sorted.empty() ? 0.0 : 1.0 / static_cast<double>(sorted.size());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && same_value(sorted[j], sorted[i])) ++j;
            out.push_back({sorted[i], static_cast<double>(j - i) * unit});
            i = j;
        }
        return out;
    }
};

/// Uniform weights 1/N on the N given values.
inline EmpiricalMeasure empirical_law(std::span<const double> values) {
    RWRE_REQUIRE(!values.empty(), ErrorCode::EmptySample, "empirical law of an empty sample");
    EmpiricalMeasure m;
    m.samples.assign(values.begin(), values.end());
    m.atom_weights = EmpiricalMeasure::aggregate(values);
    m.normalized = true;
    return m;
}

/// Weighted sample: mass weights[k] / sum(weights) on values[k].
inline EmpiricalMeasure weighted_law(std::span<const double> values, std::span<const double> weights) {
    RWRE_REQUIRE(!values.empty(), ErrorCode::EmptySample, "empirical law of an empty sample");
    RWRE_REQUIRE(values.size() == weights.size(), ErrorCode::PreconditionViolation, "one weight per value");
    std::vector<std::size_t> order(values.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double total = 0.0;
    for (double w : weights) total += w;
    RWRE_REQUIRE(total > 0.0, ErrorCode::EmptySample, "sample carries no weight");
    EmpiricalMeasure m;
    m.samples.assign(values.begin(), values.end());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        double w = 0.0;
        while (j < order.size() && same_value(values[order[j]], values[order[i]])) w += weights[order[j++]];
        m.atom_weights.push_back({values[order[i]], w / total});
        i = j;
    }
    m.normalized = true;
    return m;
}

/// Point masses with the given (unnormalized) weights, rescaled to sum to 1.
inline EmpiricalMeasure normalized_atoms(std::vector<Atom> atoms) {
    RWRE_REQUIRE(!atoms.empty(), ErrorCode::EmptySample, "no atoms to normalize");
    double total = 0.0;
    for (const auto& a : atoms) total += a.weight;
    RWRE_REQUIRE(total > 0.0, ErrorCode::EmptySample, "atoms carry no mass");
    for (auto& a : atoms) a.weight /= total;
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    EmpiricalMeasure m;
    m.atom_weights = std::move(atoms);
    m.normalized = true;
    return m;
}

} // namespace rwre
