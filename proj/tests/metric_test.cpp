#include "hspace/metric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"

using namespace hspace;

TEST(Point, RejectsNonFiniteAndEmpty) {
    EXPECT_THROW(Point({std::nan("")}), InvalidPointError);
    EXPECT_THROW(Point({1.0, std::numeric_limits<double>::infinity()}), InvalidPointError);
    EXPECT_THROW(Point(std::vector<double>{}), InvalidPointError);
}

TEST(Distance, IdentityCase) {
    const MetricSpec m = MetricSpec::euclidean();
    EXPECT_EQ(distance(Point{0.0}, Point{0.0}, m), 0.0);
}

TEST(Distance, LineSegmentOnTheRealLine) {
    const MetricSpec m = MetricSpec::euclidean();
    EXPECT_EQ(distance(Point{1.0}, Point{0.25}, m), 0.75);
}

TEST(Distance, PythagoreanTriple) {
    // hand oracle: sqrt(3^2 + 4^2) = 5
    EXPECT_EQ(distance(Point{3.0, 4.0}, Point{0.0, 0.0}, MetricSpec::euclidean()), 5.0);
}

TEST(Distance, BuiltinsOnAKnownPair) {
    const Point a{-1.0, -1.0}, b{2.0, 3.0};
    EXPECT_EQ(distance(a, b, MetricSpec::euclidean()), 5.0);
    EXPECT_EQ(distance(a, b, MetricSpec::manhattan()), 7.0);
    EXPECT_EQ(distance(a, b, MetricSpec::chebyshev()), 4.0);
}

TEST(Distance, DimensionMismatchThrows) {
    EXPECT_THROW(distance(Point{1.0}, Point{1.0, 2.0}, MetricSpec::euclidean()),
                 DimensionError);
}

TEST(Distance, CustomCallback) {
    const MetricSpec m = MetricSpec::custom(
        [](const Point& x, const Point& y) { return 2.0 * std::fabs(x[0] - y[0]); });
    EXPECT_EQ(distance(Point{1.0}, Point{3.0}, m), 4.0);
}

TEST(Distance, TriangleInequalityRandomized) {
    auto g = tsup::rng(101);
    const MetricSpec metrics[] = {MetricSpec::euclidean(), MetricSpec::manhattan(),
                                  MetricSpec::chebyshev()};
    int checked = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const MetricSpec& m = metrics[trial % 3];
        const Point x = tsup::random_point(g, d, -10.0, 10.0);
        const Point y = tsup::random_point(g, d, -10.0, 10.0);
        const Point z = tsup::random_point(g, d, -10.0, 10.0);
        ASSERT_LE(m(x, z), m(x, y) + m(y, z) + 1e-12);
        ASSERT_EQ(m(x, y), m(y, x));
        ASSERT_GE(m(x, y), 0.0);
        ++checked;
    }
    EXPECT_GE(checked, 10000);
}

TEST(PointSet, RejectsEmptyAndMixedDimensions) {
    EXPECT_THROW(PointSet(std::vector<Point>{}), EmptySetError);
    EXPECT_THROW(PointSet({Point{1.0}, Point{1.0, 2.0}}), DimensionError);
}

TEST(PointSet, ExactDedupKeepsFirstOccurrence) {
    const PointSet s({Point{1.0}, Point{2.0}, Point{1.0}, Point{-0.0}, Point{0.0}});
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0], Point{1.0});
    EXPECT_EQ(s[1], Point{2.0});
}

TEST(PointSet, ToleranceDedupIsAGreedyNet) {
    const PointSet s({Point{0.0}, Point{0.05}, Point{0.2}, Point{0.29}}, 0.1);
    // 0.05 within 0.1 of 0.0, 0.29 within 0.1 of 0.2
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0], Point{0.0});
    EXPECT_EQ(s[1], Point{0.2});
    EXPECT_EQ(s.dedup_tol(), 0.1);
}

TEST(PointSetDistance, MembershipGivesZero) {
    const PointSet a({Point{1.0}});
    EXPECT_EQ(point_set_distance(Point{1.0}, a, MetricSpec::euclidean()), 0.0);
}

TEST(PointSetDistance, SingletonOnTheLine) {
    const PointSet a({Point{1.0 / 3.0}});
    EXPECT_EQ(point_set_distance(Point{1.0}, a, MetricSpec::euclidean()), 1.0 - 1.0 / 3.0);
}

TEST(PointSetDistance, ExhaustiveMinOverReciprocals) {
    std::vector<Point> pts;
    for (int i = 1; i <= 10; ++i) pts.push_back(Point{1.0 / i});
    const PointSet a(pts);
    // oracle: min over the ten candidates is the last one
    EXPECT_EQ(point_set_distance(Point{0.0}, a, MetricSpec::euclidean()), 0.1);
}

TEST(PointSetDistance, UnionIsMinOfParts) {
    auto g = tsup::rng(77);
    const MetricSpec m = MetricSpec::euclidean();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const PointSet a = tsup::random_cloud(g, 1 + g() % 20, d);
        const PointSet b = tsup::random_cloud(g, 1 + g() % 20, d);
        std::vector<Point> both(a.begin(), a.end());
        both.insert(both.end(), b.begin(), b.end());
        const PointSet ab(both);
        const Point x = tsup::random_point(g, d, -2.0, 2.0);
        EXPECT_EQ(point_set_distance(x, ab, m),
                  std::min(point_set_distance(x, a, m), point_set_distance(x, b, m)));
    }
}

TEST(PointSetDistance, MonotoneUnderSupersets) {
    auto g = tsup::rng(78);
    const MetricSpec m = MetricSpec::euclidean();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const PointSet a = tsup::random_cloud(g, 1 + g() % 15, d);
        std::vector<Point> bigger(a.begin(), a.end());
        bigger.push_back(tsup::random_point(g, d));
        const PointSet b(bigger);
        const Point x = tsup::random_point(g, d, -2.0, 2.0);
        EXPECT_LE(point_set_distance(x, b, m), point_set_distance(x, a, m));
    }
}

TEST(NearestPoint, TieBreaksToLowestIndex) {
    const PointSet a({Point{1.0}, Point{-1.0}});
    const auto [p, d] = nearest_point(Point{0.0}, a, MetricSpec::euclidean());
    EXPECT_EQ(p, Point{1.0});
    EXPECT_EQ(d, 1.0);
}

TEST(NearestPoint, PicksTheCloserCandidate) {
    const PointSet a({Point{0.5}, Point{2.0}});
    const auto [p, d] = nearest_point(Point{1.0}, a, MetricSpec::euclidean());
    EXPECT_EQ(p, Point{0.5});
    EXPECT_EQ(d, 0.5);
}

TEST(NearestPoint, MembershipCase) {
    const PointSet a({Point{5.0}});
    const auto [p, d] = nearest_point(Point{5.0}, a, MetricSpec::euclidean());
    EXPECT_EQ(p, Point{5.0});
    EXPECT_EQ(d, 0.0);
}

TEST(NearestPoint, DistanceComponentMatchesPointSetDistance) {
    auto g = tsup::rng(79);
    const MetricSpec metrics[] = {MetricSpec::euclidean(), MetricSpec::manhattan(),
                                  MetricSpec::chebyshev()};
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const MetricSpec& m = metrics[trial % 3];
        const PointSet a = tsup::random_cloud(g, 1 + g() % 30, d);
        const Point x = tsup::random_point(g, d, -2.0, 2.0);
        EXPECT_EQ(nearest_point(x, a, m).second, point_set_distance(x, a, m));
    }
}
