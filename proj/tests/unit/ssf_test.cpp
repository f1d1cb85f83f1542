#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pors/ssf.hpp"
#include "synthetic.hpp"

namespace pors {
namespace {

using testing::front_from_points;

ObjectivePoint pt(double p, double r) { return ObjectivePoint{p, r, std::nullopt}; }

std::vector<ObjectivePoint> staircase() {
    return {pt(4, 1), pt(3.5, 2), pt(2.5, 2.5), pt(2, 4), pt(1, 5)};
}

std::vector<std::size_t> ids(std::initializer_list<std::size_t> v) { return v; }

// Front whose entries carry coverages given as row lists over n rows.
ParetoFront front_with_coverage(std::size_t n, const std::vector<std::vector<std::size_t>>& rows) {
    const auto pool = testing::pool_from_sets(n, {0}, rows);
    std::vector<RuleSubset> sols;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        RuleSubset s;
        s.members = {static_cast<RuleIndex>(i)};
        s.coverage = pool.rules[i];
        // Distinct, mutually non-dominated objectives.
        s.objective = pt(1.0 - 0.1 * static_cast<double>(i), 0.1 * static_cast<double>(i + 1));
        sols.push_back(std::move(s));
    }
    return make_pareto_front(std::move(sols));
}

TEST(SsfNames, RoundTrip) {
    for (const auto k : kAllSsfKinds) EXPECT_EQ(parse_ssf(ssf_name(k)), k);
    EXPECT_EQ(parse_ssf("igd+-ss"), SsfKind::kIgdPlus);
    try {
        parse_ssf("bogus");
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("unknown SSF method"), std::string::npos);
    }
}

TEST(SelectSsf, SmallFrontReturnedWhole) {
    const auto f = front_with_coverage(6, {{0, 1}, {2, 3}, {4, 5}});
    for (const auto kind : kAllSsfKinds) {
        EXPECT_EQ(select_ssf(f, SsfMethod{kind, 10, false}), ids({0, 1, 2})) << ssf_name(kind);
    }
    EXPECT_THROW(select_ssf(ParetoFront{}, SsfMethod{}), std::invalid_argument);
    EXPECT_THROW(select_ssf(f, SsfMethod{SsfKind::kHv, 0, false}), std::invalid_argument);
}

TEST(SelectSsf, HvKOneMaximizesProduct) {
    const auto f = front_from_points(staircase());
    // products 4, 7, 6.25, 8, 5
    EXPECT_EQ(select_ssf(f, SsfMethod{SsfKind::kHv, 1, false}), ids({3}));
}

TEST(SelectSsf, HvcKOneMaximizesExclusiveContribution) {
    const auto f = front_from_points(staircase());
    // exclusive contributions 0.5, 1.0, 0.25, 1.5, 1.0
    EXPECT_EQ(select_ssf(f, SsfMethod{SsfKind::kHvc, 1, false}), ids({3}));
}

TEST(SelectSsf, DeterministicAndDistinct) {
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
        const auto f = front_from_points(testing::random_dyadic_front(rng, 30, 8));
        for (const auto kind : kAllSsfKinds) {
            if (kind == SsfKind::kEquiJaccard || kind == SsfKind::kKMedoidsJaccard) continue;
            const SsfMethod m{kind, 7, false};
            const auto a = select_ssf(f, m);
            EXPECT_EQ(a, select_ssf(f, m));
            EXPECT_EQ(a.size(), 7u);
            EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 7u);
            EXPECT_LT(a.back(), f.size());
        }
    }
}

TEST(SampleEquiArc, StaircaseManhattanKThree) {
    const auto f = staircase();
    EXPECT_EQ(sample_equi_arc(f, 3, ArcMetric::kManhattan), ids({0, 2, 4}));
    EXPECT_EQ(sample_equi_arc(f, 2, ArcMetric::kManhattan), ids({0, 4}));
    EXPECT_EQ(sample_equi_arc(f, 2, ArcMetric::kEuclidean), ids({0, 4}));
}

TEST(SampleEquiArc, CollinearEuclidean) {
    std::vector<ObjectivePoint> line;
    for (int i = 0; i < 5; ++i) line.push_back(pt(1.0 - 0.2 * i, 0.1 + 0.2 * i));
    EXPECT_EQ(sample_equi_arc(line, 3, ArcMetric::kEuclidean), ids({0, 2, 4}));
}

TEST(SampleByArc, TopsUpDuplicates) {
    // Targets 0, 2, 4, 6: the middle two go to the nearest interior positions.
    const std::vector<double> cum{0, 0.1, 0.2, 5.9, 6};
    const auto s = sample_by_arc(cum, 4);
    EXPECT_EQ(s, ids({0, 2, 3, 4}));
    // Targets 0, 3, 6 for k = 3 on a clustered curve: 3 maps to index 3.
    const std::vector<double> clustered{0, 0.1, 0.2, 0.3, 6};
    EXPECT_EQ(sample_by_arc(clustered, 3), ids({0, 3, 4}));
    // Every target on one side collides; duplicates are topped up.
    const std::vector<double> lopsided{0, 5.7, 5.8, 5.9, 6};
    EXPECT_EQ(sample_by_arc(lopsided, 4).size(), 4u);
    EXPECT_EQ(sample_by_arc(cum, 1), ids({2}));
}

TEST(TspTour, VisitsEveryNodeFromZero) {
    Rng rng(3);
    std::vector<ObjectivePoint> pts;
    for (int i = 0; i < 15; ++i) pts.push_back(pt(rng.uniform(), rng.uniform()));
    const auto d = euclidean_matrix(pts);
    const auto tour = tsp_tour(d);
    ASSERT_EQ(tour.size(), 15u);
    EXPECT_EQ(tour[0], 0u);
    EXPECT_EQ(std::set<std::size_t>(tour.begin(), tour.end()).size(), 15u);
}

TEST(EquiJaccard, TwoEntries) {
    const auto f = front_with_coverage(4, {{0, 1}, {2, 3}});
    EXPECT_EQ(select_ssf(f, SsfMethod{SsfKind::kEquiJaccard, 2, false}), ids({0, 1}));
}

TEST(EquiJaccard, NearDuplicatePairs) {
    // {0,1} ~ {0,1,2} and {10,11} ~ {10,11,12}: long edges only between the pairs.
    const auto f = front_with_coverage(13, {{0, 1}, {0, 1, 2}, {10, 11}, {10, 11, 12}});
    const auto s = select_ssf(f, SsfMethod{SsfKind::kEquiJaccard, 2, false});
    ASSERT_EQ(s.size(), 2u);
    EXPECT_LT(s[0], 2u);
    EXPECT_GE(s[1], 2u);
}

TEST(EquiJaccard, EqualDistancesEvenlySpaced) {
    // Disjoint coverages: every pairwise distance is 1.
    std::vector<std::vector<std::size_t>> rows;
    for (std::size_t i = 0; i < 7; ++i) rows.push_back({i});
    const auto f = front_with_coverage(7, rows);
    const auto s = select_ssf(f, SsfMethod{SsfKind::kEquiJaccard, 4, false});
    EXPECT_EQ(s.size(), 4u);
    EXPECT_EQ(s, select_ssf(f, SsfMethod{SsfKind::kEquiJaccard, 4, false}));
    const auto tour = tsp_tour(jaccard_matrix(f));
    // All edges tie, so the first one is cut and the path runs tour[1..6], tour[0].
    std::vector<std::size_t> expected{tour[1], tour[3], tour[5], tour[0]};
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(s, expected);
}

TEST(GreedyIndicator, KEqualsFrontReturnsAll) {
    const auto f = staircase();
    for (const auto ind : {Indicator::kHv, Indicator::kHvc, Indicator::kIgd, Indicator::kIgdPlus}) {
        EXPECT_EQ(select_greedy_indicator(f, 5, ind), ids({0, 1, 2, 3, 4}));
    }
    const std::vector<ObjectivePoint> all = f;
    const std::vector<ObjectivePoint> sel = f;
    EXPECT_DOUBLE_EQ(hv_contribution(sel, all), hypervolume(all));
}

TEST(KMedoids, Examples) {
    std::vector<ObjectivePoint> two_clusters{pt(0.9, 0.1), pt(0.88, 0.12), pt(0.91, 0.13),
                                             pt(0.1, 0.9), pt(0.12, 0.88), pt(0.13, 0.92)};
    const auto d = euclidean_matrix(two_clusters);
    const auto m = kmedoids_select(d, 2);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_LT(m[0], 3u);
    EXPECT_GE(m[1], 3u);
    EXPECT_EQ(kmedoids_select(d, 6), ids({0, 1, 2, 3, 4, 5}));

    const std::vector<std::vector<double>> zeros(5, std::vector<double>(5, 0.0));
    EXPECT_EQ(kmedoids_select(zeros, 3), ids({0, 1, 2}));
}

TEST(KMedoids, JaccardIdenticalCoverages) {
    const auto f = front_with_coverage(3, {{0, 1}, {0, 1}, {0, 1}, {0, 1}});
    EXPECT_EQ(select_ssf(f, SsfMethod{SsfKind::kKMedoidsJaccard, 2, false}), ids({0, 1}));
}

TEST(HvcPreviousFront, FallsBackWithoutPrevious) {
    Rng rng(5);
    const auto f = front_from_points(testing::random_dyadic_front(rng, 20, 6));
    const SsfMethod cur{SsfKind::kHvc, 4, false};
    const SsfMethod prev{SsfKind::kHvc, 4, true};
    EXPECT_EQ(select_ssf(f, cur), select_ssf(f, prev, nullptr));
    EXPECT_EQ(select_ssf(f, prev, &f), select_ssf(f, cur));
}

}  // namespace
}  // namespace pors
