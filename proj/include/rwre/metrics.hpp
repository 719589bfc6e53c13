#pragma once

// Distances between an estimated measure and a reference law. All supports are
// bounded intervals, so weak convergence is tracked through the CDF (KS, W1);
// the atomic parts are compared in total variation.

#include "rwre/distribution.hpp"
#include "rwre/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rwre {

struct LawDistance {
    double ks = 0.0;
    double wasserstein1 = 0.0;
    double tv_atoms = 0.0;
    std::size_t n_samples = 0;
};

namespace detail {

// Masses of `emp` rescaled to total 1, plus running CDF values.
struct StepCdf {
    std::vector<double> x;
    std::vector<double> right; // F(x_i)
    std::vector<double> left;  // F(x_i-)

    explicit StepCdf(const EmpiricalMeasure& emp) {
        const auto masses = emp.masses();
        double total = 0.0;
        for (const auto& a : masses) total += a.weight;
        RWRE_REQUIRE(!masses.empty() && total > 0.0, ErrorCode::EmptySample, "empty empirical measure");
        double acc = 0.0;
        for (const auto& a : masses) {
            x.push_back(a.value);
            left.push_back(acc);
            acc += a.weight / total;
            right.push_back(acc);
        }
        right.back() = 1.0;
    }

    // F(t)
    [[nodiscard]] double at(double t) const {
        auto it = std::upper_bound(x.begin(), x.end(), t);
        if (it == x.begin()) return 0.0;
        return right[static_cast<std::size_t>(it - x.begin()) - 1];
    }

    // F(t-)
    [[nodiscard]] double before(double t) const {
        auto it = std::lower_bound(x.begin(), x.end(), t);
        if (it == x.begin()) return 0.0;
        return right[static_cast<std::size_t>(it - x.begin()) - 1];
    }
};

} // namespace detail

/// sup_x |F_emp(x) - F_spec(x)|, checked at every jump of either CDF from both sides.
inline double ks_distance(const EmpiricalMeasure& emp, const DistributionSpec& spec) {
    const detail::StepCdf fe(emp);
    std::vector<double> points = fe.x;
    for (const auto& a : spec.atoms) points.push_back(a.value);
    double d = 0.0;
    for (double t : points) {
        d = std::max(d, std::abs(fe.at(t) - spec.cdf(t)));
        d = std::max(d, std::abs(fe.before(t) - spec.cdf_left(t)));
    }
    return std::min(d, 1.0);
}

/// Integral of |F_emp - F_spec|, exact on each segment between breakpoints
/// (F_emp is constant there and F_spec is affine).
inline double wasserstein1_distance(const EmpiricalMeasure& emp, const DistributionSpec& spec) {
    const detail::StepCdf fe(emp);
    std::vector<double> b = fe.x;
    for (const auto& a : spec.atoms) b.push_back(a.value);
    for (const auto& p : spec.pieces) {
        b.push_back(p.lower);
        b.push_back(p.upper);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double lo = b[i];
        const double hi = b[i + 1];
        const double h = hi - lo;
        const double c = fe.at(lo);
        const double g0 = spec.cdf(lo) - c;
        const double g1 = spec.cdf_left(hi) - c;
        if ((g0 >= 0.0 && g1 >= 0.0) || (g0 <= 0.0 && g1 <= 0.0)) {
            total += 0.5 * (std::abs(g0) + std::abs(g1)) * h;
        } else {
            total += h * (g0 * g0 + g1 * g1) / (2.0 * (std::abs(g0) + std::abs(g1)));
        }
    }
    return total;
}

/// Half the l1 distance between the atom weights of `est` and of `spec`.
inline double tv_atoms(const EmpiricalMeasure& est, const DistributionSpec& spec) {
    const auto est_atoms = est.atom_weights.empty() ? est.masses() : est.atom_weights;
    double sum = 0.0;
    for (const auto& a : est_atoms) sum += std::abs(a.weight - spec.atom_weight(a.value));
    for (const auto& a : spec.atoms) {
        const bool shared = std::any_of(est_atoms.begin(), est_atoms.end(),
                                        [&](const Atom& e) { return same_value(e.value, a.value); });
        if (!shared) sum += a.weight;
    }
    return std::clamp(0.5 * sum, 0.0, 1.0);
}

inline LawDistance law_distance(const EmpiricalMeasure& emp, const DistributionSpec& spec) {
    LawDistance d;
    d.ks = ks_distance(emp, spec);
    d.wasserstein1 = wasserstein1_distance(emp, spec);
    d.tv_atoms = tv_atoms(emp, spec);
    d.n_samples = emp.samples.empty() ? emp.atom_weights.size() : emp.samples.size();
    return d;
}

} // namespace rwre
