#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace rwre;

namespace {

const DistributionSpec unit_piece{Situation::Bond, {}, {{0.5, 1.5, 1.0}}, 0.4};

// Midpoint Riemann sum of |F_emp - F| on a grid of step h. Exact up to O(h^2)
// per cell when every jump and kink lies on a grid node.
double w1_grid(const EmpiricalMeasure& emp, const DistributionSpec& spec, double lo, double hi, double h) {
    const auto masses = emp.masses();
    const auto cells = static_cast<std::size_t>(std::llround((hi - lo) / h));
    double total = 0.0;
    std::size_t next = 0;
    double fe = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = lo + (static_cast<double>(i) + 0.5) * h;
        while (next < masses.size() && masses[next].value <= x) fe += masses[next++].weight;
        total += std::abs(fe - spec.cdf(x)) * h;
    }
    return total;
}

} // namespace

TEST(EmpiricalLaw, SingleValue) {
    const auto m = empirical_law(std::vector<double>{0.4});
    ASSERT_EQ(m.atom_weights.size(), 1u);
    EXPECT_EQ(m.atom_weights[0].weight, 1.0);
}

TEST(EmpiricalLaw, RepeatedValue) {
    const auto m = empirical_law(std::vector<double>{0.4, 0.4, 0.7});
    EXPECT_DOUBLE_EQ(m.weight_of(0.4), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.weight_of(0.7), 1.0 / 3.0);
}

TEST(EmpiricalLaw, EmptySample) {
    EXPECT_THROW(empirical_law(std::vector<double>{}), Error);
}

TEST(WeightedLaw, NormalizesWeights) {
    const auto m = weighted_law(std::vector<double>{0.4, 0.7, 0.4}, std::vector<double>{1.0, 2.0, 1.0});
    EXPECT_DOUBLE_EQ(m.weight_of(0.4), 0.5);
    EXPECT_DOUBLE_EQ(m.weight_of(0.7), 0.5);
}

TEST(Ks, ExactAtomicLawIsAtDistanceZero) {
    const DistributionSpec spec{Situation::Site, {{0.3, 0.25}, {0.7, 0.75}}, {}, 0.25};
    EXPECT_EQ(ks_distance(normalized_atoms({{0.3, 0.25}, {0.7, 0.75}}), spec), 0.0);
}

TEST(Ks, DisjointPointMasses) {
    const DistributionSpec spec{Situation::Site, {{0.7, 1.0}}, {}, 0.25};
    EXPECT_EQ(ks_distance(empirical_law(std::vector<double>{0.3}), spec), 1.0);
}

TEST(Ks, KolmogorovQuantile) {
    // 1.628 / sqrt(n) is the 99% quantile of sqrt(n) KS for continuous laws
    const std::size_t n = 10000;
    std::size_t within = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        std::mt19937_64 rng(1000 + rep);
        std::vector<double> xs(n);
        for (auto& x : xs) x = unit_piece.sample(to_open_unit(rng()), to_open_unit(rng()));
        within += ks_distance(empirical_law(xs), unit_piece) <= 1.628 / std::sqrt(static_cast<double>(n));
    }
    EXPECT_GE(within, 99u);
}

TEST(W1, ExactAtomicLaw) {
    const DistributionSpec spec{Situation::Site, {{0.3, 0.25}, {0.7, 0.75}}, {}, 0.25};
    EXPECT_NEAR(wasserstein1_distance(normalized_atoms({{0.3, 0.25}, {0.7, 0.75}}), spec), 0.0, 1e-15);
}

TEST(W1, PointMasses) {
    const DistributionSpec spec{Situation::Site, {{0.7, 1.0}}, {}, 0.25};
    EXPECT_NEAR(wasserstein1_distance(empirical_law(std::vector<double>{0.3}), spec), 0.4, 1e-15);
}

TEST(W1, AgreesWithGridOracle) {
    constexpr double lo = 0.4, h = 1e-5;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // random point of [a, b] on the grid
    auto node = [&](double a, double b) { return lo + std::round((a + (b - a) * u(rng) - lo) / h) * h; };
    for (int trial = 0; trial < 10; ++trial) {
        // random mixture of two atoms and two pieces inside (0.4, 2.5)
        const double w_a = 0.1 + 0.3 * u(rng), w_b = 0.1 + 0.3 * u(rng);
        const double rest = (1.0 - w_a - w_b) / 2.0;
        const double l1 = node(0.5, 1.5), l2 = node(0.5, 1.5);
        const DistributionSpec spec{Situation::Bond,
                                    {{node(0.45, 2.35), w_a}, {node(0.45, 2.35), w_b}},
                                    {{l1, node(l1 + 0.2, l1 + 0.7), rest}, {l2, node(l2 + 0.1, l2 + 0.6), rest}},
                                    0.4};
        std::vector<double> xs;
        for (int k = 0; k < 30; ++k) xs.push_back(node(0.45, 2.35));
        const auto emp = empirical_law(xs);
        EXPECT_NEAR(wasserstein1_distance(emp, spec), w1_grid(emp, spec, lo, 2.5, h), 1e-6) << trial;
    }
}

TEST(TvAtoms, Examples) {
    const DistributionSpec spec{Situation::Site, {{0.3, 0.5}, {0.7, 0.5}}, {}, 0.25};
    EXPECT_EQ(tv_atoms(normalized_atoms({{0.3, 0.5}, {0.7, 0.5}}), spec), 0.0);
    const DistributionSpec single{Situation::Site, {{0.7, 1.0}}, {}, 0.25};
    EXPECT_EQ(tv_atoms(normalized_atoms({{0.3, 1.0}}), single), 1.0);
    EXPECT_NEAR(tv_atoms(normalized_atoms({{0.3, 0.45}, {0.7, 0.55}}), spec), 0.05, 1e-15);
}

TEST(LawDistance, FieldsPopulated) {
    const auto d = law_distance(empirical_law(std::vector<double>{0.6, 0.9, 1.2}), unit_piece);
    EXPECT_GT(d.ks, 0.0);
    EXPECT_GT(d.wasserstein1, 0.0);
    EXPECT_EQ(d.n_samples, 3u);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace {

ExperimentConfig bond_config() {
    ExperimentConfig c;
    c.situation = Situation::Bond;
    c.rho = oracle::bond_mixture();
    c.nu = {Situation::Bond, {{1.0, 0.5}}, {{0.5, 2.0, 0.5}}, 0.4};
    c.p = 0.3;
    c.n_steps = 100000;
    c.seeds = {101, 202, 303};
    return c;
}

} // namespace

TEST(Grid, Parse) {
    const auto g = parse_grid("1000,2000,4000x2");
    EXPECT_EQ(g.n_steps, (std::vector<std::int64_t>{1000, 2000, 4000}));
    EXPECT_EQ(g.seeds, 2u);
    EXPECT_EQ(parse_grid("500").seeds, 1u);
    EXPECT_THROW(parse_grid("12,abc"), Error);
    EXPECT_THROW(parse_grid("10x0"), Error);
}

TEST(Sweep, OnePoint) {
    const auto rows = sweep(bond_config(), parse_grid("100000"), 1, false);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_TRUE(rows[0].result.error.empty()) << rows[0].result.error;
    EXPECT_EQ(rows[0].case_kind, CaseKind::CaseA);
}

TEST(Sweep, RowsInGridOrderAndReproducible) {
    const auto grid = parse_grid("50000,100000,200000x2");
    const auto a = sweep(bond_config(), grid, 4, false);
    const auto b = sweep(bond_config(), grid, 1, false);
    ASSERT_EQ(a.size(), 6u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].n_steps, grid.n_steps[i / 2]);
        EXPECT_EQ(a[i].seed, i % 2);
    }
    EXPECT_EQ(sweep_csv(a, Situation::Bond, false), sweep_csv(b, Situation::Bond, false));
}

TEST(Sweep, FailingRowIsIsolated) {
    const auto rows = sweep(bond_config(), parse_grid("2,50000,100000,150000,200000,250000"), 3, false);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_FALSE(rows[0].result.error.empty());
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_TRUE(rows[i].result.error.empty()) << rows[i].result.error;
    const auto csv = sweep_csv(rows, Situation::Bond, false);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}
