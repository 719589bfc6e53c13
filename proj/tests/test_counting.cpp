#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace rwre;

namespace {

std::vector<double> seq(std::initializer_list<double> v) { return v; }

} // namespace

TEST(Candidates, SingleAdjacentRepeat) {
    EXPECT_EQ(detect_atom_candidates_site(seq({0.1, 0.1, 0.2, 0.3})).sorted(), seq({0.1}));
}

TEST(Candidates, NoneWhenAllDistinct) {
    EXPECT_TRUE(detect_atom_candidates_site(seq({0.1, 0.2, 0.3, 0.4})).empty());
}

TEST(Candidates, MatchesScan) {
    const auto chi = seq({0.1, 0.2, 0.2, 0.1, 0.1});
    EXPECT_EQ(detect_atom_candidates_site(chi).sorted(), seq({0.1, 0.2}));
    EXPECT_EQ(oracle::site_candidates(chi), seq({0.1, 0.2}));
}

TEST(SplitNonAtoms, RecurringAndOneOff) {
    std::vector<double> chi;
    for (int i = 0; i < 7; ++i) chi.insert(chi.end(), {0.4, 0.6});
    chi.push_back(0.9);
    const auto split = split_nonatom_values(chi, ValueSet{}, 2);
    EXPECT_TRUE(split.rho_values.contains(0.4));
    EXPECT_TRUE(split.nu_values.contains(0.9));
    EXPECT_FALSE(split.rho_values.contains(0.9));
}

TEST(SplitNonAtoms, NoOneOffValues) {
    const auto split = split_nonatom_values(seq({0.1, 0.2, 0.1, 0.2}), ValueSet{}, 2);
    EXPECT_TRUE(split.nu_values.empty());
    EXPECT_EQ(split.rho_values.size(), 2u);
}

TEST(HStats, TripleRunsAgainstScan) {
    std::vector<double> chi;
    for (int m = 0; m < 5; ++m) chi.insert(chi.end(), {0.3, 0.3, 0.3, 0.6});
    const auto s = h_stats_site(chi, 0.3);
    const auto ref = oracle::counts(chi, 0.3, Situation::Site);
    EXPECT_EQ(s.count_single, 15u);
    EXPECT_EQ(s.count_pair, 10u);
    EXPECT_EQ(s.count_triple, 5u);
    EXPECT_TRUE(oracle::same_counts(s, ref));
    EXPECT_DOUBLE_EQ(*s.h_cond_2, 0.5);
}

TEST(HStats, AbsentValue) {
    const auto s = h_stats_site(seq({0.1, 0.2, 0.1}), 0.5);
    EXPECT_EQ(s.h_double, 0.0);
    EXPECT_EQ(s.h_single, 0.0);
    EXPECT_FALSE(s.h_cond_2.has_value());
    EXPECT_FALSE(s.h_cond_1.has_value());
}

TEST(HStats, ConstantStreamHasDoubleFrequencyOne) {
    std::vector<double> chi(1000, 0.45);
    EXPECT_DOUBLE_EQ(h_stats_site(chi, 0.45).h_double, 1.0);
    EXPECT_DOUBLE_EQ(*h_stats_site(chi, 0.45).h_cond_2, 998.0 / 999.0); // the last pair has no successor
}

TEST(HStats, BondShortString) {
    // (a, a, b, a): the first three entries are averaged
    const auto chi = seq({0.7, 0.7, 0.2, 0.7});
    const auto s = h_stats_bond(chi, 0.7);
    EXPECT_EQ(s.count_single, 2u);
    EXPECT_EQ(s.count_pair, 1u);
    EXPECT_DOUBLE_EQ(s.h_single, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(*s.h_cond_1, 0.5);
    EXPECT_TRUE(oracle::same_counts(s, oracle::counts(chi, 0.7, Situation::Bond)));
    EXPECT_EQ(h_stats_bond(chi, 0.9).h_single, 0.0);
}

TEST(Markers, FreshPairSeenAgain) {
    // a, b fresh at 0, 1 and read again adjacently later
    const auto chi = seq({0.11, 0.12, 0.13, 0.14, 0.11, 0.12});
    const auto t = marker_times(chi, ValueSet{});
    ASSERT_FALSE(t.empty());
    EXPECT_EQ(t.front(), 2u);
    EXPECT_EQ(t, oracle::site_markers(chi, {}));
}

TEST(Markers, EmptyWhenEverythingIsCandidate) {
    const auto chi = seq({0.1, 0.1, 0.2, 0.2, 0.1, 0.1, 0.2, 0.2});
    EXPECT_TRUE(marker_times(chi, detect_atom_candidates_site(chi)).empty());
}

TEST(Markers, PairNeverReadAgainAdjacently) {
    // both values recur, but never as the ordered pair (a, b)
    const auto chi = seq({0.11, 0.12, 0.13, 0.12, 0.14, 0.11});
    const auto t = marker_times(chi, ValueSet{});
    EXPECT_TRUE(std::find(t.begin(), t.end(), 2u) == t.end());
    EXPECT_EQ(t, oracle::site_markers(chi, {}));
}

TEST(Markers, BondFreshValueSeenAgain) {
    const auto chi = seq({0.8, 0.9, 0.8, 1.1});
    EXPECT_EQ(marker_times_bond(chi, ValueSet{}), (std::vector<std::size_t>{1}));
}

TEST(FreshObservations, SteppedBackIsExcluded) {
    // chi(2) = chi(0): the walk stepped back from the marker pair
    const auto chi = seq({0.11, 0.12, 0.11, 0.12, 0.13});
    const std::vector<std::size_t> t{2};
    EXPECT_TRUE(fresh_observations(chi, t, ValueSet{}).empty());
}

TEST(FreshObservations, NeverSeenAgainIsExcluded) {
    const auto chi = seq({0.11, 0.12, 0.13, 0.11, 0.12});
    const std::vector<std::size_t> t{2};
    EXPECT_TRUE(fresh_observations(chi, t, ValueSet{}).empty());
}

TEST(FreshObservations, FreshRecurringValueIsIncluded) {
    const auto chi = seq({0.11, 0.12, 0.13, 0.12, 0.11, 0.12, 0.13});
    const std::vector<std::size_t> t{2};
    EXPECT_EQ(fresh_observations(chi, t, ValueSet{}), seq({0.13}));
    EXPECT_TRUE(fresh_observations(chi, t, ValueSet{0.13}).empty());
}

TEST(SizeBiasWeights, OnePlusRatio) {
    const auto chi = seq({0.5, 1.5, 1.0});
    const std::vector<std::size_t> t{1, 2};
    EXPECT_EQ(size_bias_weights(chi, t), seq({1.0 + 0.5 / 1.5, 1.0 + 1.5 / 1.0}));
}

TEST(BondDetection, FrequentValueIsCandidate) {
    std::vector<double> chi;
    for (int i = 0; i < 1000000; ++i) chi.push_back(i % 25 == 0 ? 0.6 : 1.0 + i * 1e-7);
    chi[10] = chi[12] = 1.7;
    const auto d = detect_atoms_bond(chi);
    EXPECT_TRUE(d.candidates.contains(0.6));
    EXPECT_TRUE(d.rho_nonatoms.contains(1.7));
    EXPECT_TRUE(d.nu_nonatoms.contains(chi[11]));
    EXPECT_EQ(d.candidates.size(), 1u);
}

TEST(IndexedStream, FirstLastCount) {
    const auto chi = seq({0.2, 0.3, 0.2, 0.4});
    const IndexedStream s(chi);
    EXPECT_EQ(s.distinct(), 3u);
    const auto a = *s.find(0.2);
    EXPECT_EQ(s.count(a), 2u);
    EXPECT_EQ(s.first(a), 0u);
    EXPECT_EQ(s.last(a), 2u);
    EXPECT_FALSE(s.find(0.5).has_value());
}

TEST(IndexedStream, SignedZerosAreDistinctValues) {
    const auto chi = seq({0.0, -0.0});
    EXPECT_EQ(IndexedStream(chi).distinct(), 2u);
}

// Every counting routine against the brute-force scans, on the same family
// of 200 streams as the acceptance run.
TEST(OracleEquivalence, RandomStreams) {
    std::size_t site = 0, bond = 0, checks = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto t = oracle::random_stream(i);
        (t.situation == Situation::Site ? site : bond)++;
        const auto cmp = oracle::compare(t, i);
        checks += cmp.checks;
        for (const auto& m : cmp.mismatches) ADD_FAILURE() << "stream " << i << ": " << m;
    }
    EXPECT_EQ(site, 100u);
    EXPECT_EQ(bond, 100u);
    EXPECT_GT(checks, 1000u);
}
