#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace rwre;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

Classification environment_labels(std::initializer_list<double> values) {
    Classification cls;
    std::size_t i = 0;
    for (double v : values) {
        ValueClass vc;
        vc.value = v;
        vc.label = Label::RhoContinuous;
        vc.evidence.first_index = i++;
        cls.set(vc);
    }
    return cls;
}

// A 21-site window with distinct continuous values and a lazy reflecting walk on it.
struct Window {
    std::vector<double> values;
    std::vector<double> chi_prime;
};

Window reflecting_window(std::uint64_t seed, std::size_t steps) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    Window w;
    for (int i = 0; i < 21; ++i) w.values.push_back(u(rng));
    std::size_t x = 10;
    w.chi_prime.push_back(w.values[x]);
    for (std::size_t k = 0; k < steps; ++k) {
        const bool right = x == 0 || (x < 20 && rng() % 2 == 0);
        x = right ? x + 1 : x - 1;
        w.chi_prime.push_back(w.values[x]);
    }
    return w;
}

bool equal_up_to_reflection(std::vector<double> got, const std::vector<double>& want) {
    auto same = [&](const std::vector<double>& g) {
        if (g.size() != want.size()) return false;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!same_value(g[i], want[i])) return false;
        return true;
    };
    if (same(got)) return true;
    std::reverse(got.begin(), got.end());
    return same(got);
}

ReconstructedEnvironment piece(std::vector<double> values, std::size_t anchor) {
    ReconstructedEnvironment r;
    r.values = std::move(values);
    r.anchor_index = anchor;
    r.anchor_value = r.values[anchor];
    return r;
}

} // namespace

TEST(ShortestCrossings, MinimalOverAllOccurrences) {
    const std::vector<double> chi{0.1, 0.2, 0.3, 0.4, 0.5, 0.1, 0.6, 0.4, 0.1, 0.7, 0.4};
    const auto got = shortest_crossings(chi, 0.1, 0.4);
    const auto ref = oracle::shortest_crossings(chi, 0.1, 0.4);
    ASSERT_EQ(got.size(), ref.starts.size());
    EXPECT_EQ(ref.length, 2u);
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].start_index, ref.starts[i]);
        EXPECT_EQ(got[i].length(), ref.length);
        EXPECT_EQ(got[i].values.front(), 0.1);
        EXPECT_EQ(got[i].values.back(), 0.4);
    }
}

TEST(ShortestCrossings, Adjacent) {
    const std::vector<double> chi{0.3, 0.1, 0.2, 0.3};
    const auto got = shortest_crossings(chi, 0.1, 0.2);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0].length(), 1u);
    EXPECT_EQ(got[0].values, (std::vector<double>{0.1, 0.2}));
}

TEST(ShortestCrossings, SecondValueAbsentOrNeverAfter) {
    const std::vector<double> chi{0.3, 0.1, 0.2, 0.3};
    EXPECT_EQ(code_of([&] { shortest_crossings(chi, 0.1, 0.9); }), ErrorCode::NoCrossing);
    EXPECT_EQ(code_of([&] { shortest_crossings(chi, 0.2, 0.1); }), ErrorCode::NoCrossing);
}

TEST(FilterClean, DropsStringsWithNoiseInside) {
    const auto cls = environment_labels({0.1, 0.2, 0.3});
    const std::vector<double> chi{0.1, 0.9, 0.3, 0.1, 0.2, 0.3};
    auto strings = shortest_crossings(chi, 0.1, 0.3);
    ASSERT_EQ(strings.size(), 2u);
    const auto kept = filter_clean(strings, cls);
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept[0].start_index, 3u);
    EXPECT_TRUE(kept[0].clean);
}

TEST(FilterClean, KeepsStringsWithoutInterior) {
    const auto cls = environment_labels({0.1, 0.2});
    const std::vector<double> chi{0.1, 0.2, 0.5, 0.1, 0.2};
    const auto kept = filter_clean(shortest_crossings(chi, 0.1, 0.2), cls);
    EXPECT_EQ(kept.size(), 2u);
}

TEST(FilterClean, AllCorrupted) {
    const auto cls = environment_labels({0.1, 0.3});
    const std::vector<double> chi{0.1, 0.9, 0.3};
    EXPECT_EQ(code_of([&] { filter_clean(shortest_crossings(chi, 0.1, 0.3), cls); }), ErrorCode::AllCorrupted);
}

TEST(Assemble, UncorruptedWindowIsRecoveredExactly) {
    const auto w = reflecting_window(3, 200000);
    LawConfig cfg;
    cfg.situation = Situation::Site;
    const IndexedStream s(w.chi_prime);
    const auto report = reconstruct_law(s, cfg);
    EXPECT_EQ(report.classification.count(Label::RhoContinuous), 21u);
    const auto recon = assemble(s, report.classification);
    EXPECT_TRUE(equal_up_to_reflection(recon.values, w.values));
    EXPECT_TRUE(recon.anomalies.empty()) << (recon.anomalies.empty() ? "" : recon.anomalies.front());
    EXPECT_EQ(std::count(recon.values.begin(), recon.values.end(), recon.anchor_value), 1);
}

TEST(Assemble, CorruptedWindowGivesTheSameResult) {
    const auto w = reflecting_window(3, 200000);
    const DistributionSpec nu{Situation::Site, {}, {{0.2, 0.8, 1.0}}, 0.1};
    const auto run = corrupt(w.chi_prime, 0.2, nu, 17);
    LawConfig cfg;
    cfg.situation = Situation::Site;
    const IndexedStream s(run.chi);
    const auto report = reconstruct_law(s, cfg);
    const auto recon = assemble(s, report.classification);
    EXPECT_TRUE(equal_up_to_reflection(recon.values, w.values));

    AssembleOptions unfiltered;
    unfiltered.filter = false;
    const IndexedStream clean(w.chi_prime);
    const auto clean_report = reconstruct_law(clean, cfg);
    EXPECT_EQ(assemble(clean, clean_report.classification).values,
              assemble(clean, clean_report.classification, unfiltered).values);
}

TEST(Assemble, MaxExtentTruncatesEachSide) {
    const auto w = reflecting_window(5, 200000);
    LawConfig cfg;
    cfg.situation = Situation::Site;
    const IndexedStream s(w.chi_prime);
    const auto report = reconstruct_law(s, cfg);
    AssembleOptions opt;
    opt.max_extent = 3;
    const auto recon = assemble(s, report.classification, opt);
    EXPECT_LE(recon.values.size(), 7u);
    EXPECT_LE(recon.anchor_index, 3u);
    EXPECT_LE(recon.values.size() - 1 - recon.anchor_index, 3u);
}

TEST(Assemble, UsesTheShorterCrossingDirection) {
    // 0.31 -> 0.32 only happens with a backtrack over the 0.6 pair; 0.32 -> 0.31 is straight
    const std::vector<double> chi{0.31, 0.6, 0.6, 0.6, 0.6, 0.32, 0.6, 0.6, 0.31};
    auto cls = environment_labels({0.31, 0.32});
    ValueClass atom;
    atom.value = 0.6;
    atom.label = Label::RhoAtom;
    atom.evidence.first_index = 1;
    cls.set(atom);
    const auto recon = assemble(chi, cls);
    EXPECT_TRUE(equal_up_to_reflection(recon.values, {0.31, 0.6, 0.6, 0.32})) << recon.values.size();
    EXPECT_TRUE(recon.anomalies.empty());
}

TEST(Assemble, OneAnchorIsNotEnough) {
    const std::vector<double> chi{0.3, 0.3, 0.41, 0.3, 0.3, 0.41, 0.3};
    const auto cls = environment_labels({0.41});
    EXPECT_EQ(code_of([&] { assemble(chi, cls); }), ErrorCode::InsufficientAnchors);
}

TEST(Orient, SiteMajorityAgreesWithOrder) {
    const auto cls = environment_labels({0.2, 0.8, 0.4});
    const std::vector<double> chi{0.2, 0.8, 0.4, 0.8, 0.4, 0.8, 0.2};
    const auto r = orient(piece({0.2, 0.8, 0.4}, 0), chi, cls, Situation::Site);
    EXPECT_TRUE(r.oriented);
    EXPECT_EQ(r.values, (std::vector<double>{0.2, 0.8, 0.4}));
    EXPECT_EQ(r.orientation.consistent, 2u);
    EXPECT_EQ(r.orientation.contradicting, 1u);
    EXPECT_EQ(r.orientation.site_offset, 1);
}

TEST(Orient, SiteMajorityAgainstOrderReverses) {
    const auto cls = environment_labels({0.2, 0.8, 0.4});
    const std::vector<double> chi{0.2, 0.8, 0.2, 0.8, 0.2, 0.8, 0.4};
    const auto r = orient(piece({0.2, 0.8, 0.4}, 0), chi, cls, Situation::Site);
    EXPECT_TRUE(r.oriented);
    EXPECT_EQ(r.values, (std::vector<double>{0.4, 0.8, 0.2}));
    EXPECT_EQ(r.anchor_index, 2u);
    EXPECT_EQ(r.anchor_value, 0.2);
    EXPECT_GT(r.orientation.consistent, r.orientation.contradicting);
}

TEST(Orient, TieAbstains) {
    const auto cls = environment_labels({0.2, 0.8, 0.4});
    const std::vector<double> chi{0.2, 0.8, 0.4, 0.8, 0.2};
    const auto r = orient(piece({0.2, 0.8, 0.4}, 1), chi, cls, Situation::Site);
    EXPECT_FALSE(r.oriented);
    EXPECT_EQ(r.values, (std::vector<double>{0.2, 0.8, 0.4}));
    EXPECT_EQ(r.orientation.consistent, 1u);
    EXPECT_EQ(r.orientation.contradicting, 1u);
}

TEST(Orient, AllOneHalfHasNoDistinguishingSite) {
    Classification cls;
    const std::vector<double> chi{0.5, 0.5, 0.5};
    EXPECT_EQ(code_of([&] { orient(piece({0.5, 0.5, 0.5}, 0), chi, cls, Situation::Site); }),
              ErrorCode::NoDistinguishingSite);
}

TEST(Orient, OrientingTwiceIsStable) {
    const auto w = reflecting_window(7, 200000);
    LawConfig cfg;
    cfg.situation = Situation::Site;
    const IndexedStream s(w.chi_prime);
    const auto report = reconstruct_law(s, cfg);
    const auto once = orient(assemble(s, report.classification), s, report.classification, Situation::Site);
    const auto twice = orient(once, s, report.classification, Situation::Site);
    EXPECT_EQ(once.values, twice.values);
    EXPECT_EQ(twice.orientation.consistent, once.orientation.consistent);
}

TEST(Orient, BondVotesUseArrivalDirection) {
    // edges e0..e3 = (1.0, 0.6, 1.8, 1.2); arriving over e0 onto e1 then e2 is a right step
    const auto cls = environment_labels({1.0, 0.6, 1.8, 1.2});
    const std::vector<double> chi{1.0, 0.6, 1.8, 1.8, 0.6, 1.0, 0.6, 1.8};
    const auto r = orient(piece({1.0, 0.6, 1.8, 1.2}, 0), chi, cls, Situation::Bond);
    EXPECT_TRUE(r.oriented);
    EXPECT_EQ(r.values, (std::vector<double>{1.0, 0.6, 1.8, 1.2}));
    EXPECT_EQ(r.orientation.consistent, 2u);
    EXPECT_EQ(r.orientation.contradicting, 0u);
    EXPECT_EQ(r.orientation.site_offset, 1);
}

TEST(Align, PlantedShift) {
    Environment env({Situation::Site, {}, {{0.2, 0.8, 1.0}}, 0.1}, 12);
    std::vector<double> vals;
    for (std::int64_t z = 7; z < 28; ++z) vals.push_back(env.value(z));
    const auto a = align_score(piece(vals, 10), env, 100);
    EXPECT_EQ(a.best_shift, 7);
    EXPECT_EQ(a.match_length, 21u);
    EXPECT_TRUE(a.exact);
}

TEST(Align, OneWrongValue) {
    Environment env({Situation::Site, {}, {{0.2, 0.8, 1.0}}, 0.1}, 12);
    std::vector<double> vals;
    for (std::int64_t z = -5; z < 16; ++z) vals.push_back(env.value(z));
    vals[15] = 0.5;
    const auto a = align_score(piece(vals, 3), env, 100);
    EXPECT_FALSE(a.exact);
    EXPECT_LT(a.match_length, vals.size());
    EXPECT_EQ(a.match_length, 15u);
    EXPECT_EQ(a.best_shift, -5);
}

TEST(Align, EmptyPiece) {
    Environment env({Situation::Site, {}, {{0.2, 0.8, 1.0}}, 0.1}, 12);
    EXPECT_EQ(align_score(ReconstructedEnvironment{}, env, 10).match_length, 0u);
}

TEST(Align, ReflectionIsNotATranslation) {
    Environment env({Situation::Site, {}, {{0.2, 0.8, 1.0}}, 0.1}, 12);
    std::vector<double> vals;
    for (std::int64_t z = 0; z < 21; ++z) vals.push_back(env.value(z));
    std::reverse(vals.begin(), vals.end());
    EXPECT_EQ(align_score(piece(vals, 10), env, 100).match_length, 1u);
}
