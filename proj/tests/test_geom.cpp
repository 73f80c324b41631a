#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "untangle/geom.hpp"

using namespace untangle;

namespace {

CircleT pole_top() {
    CircleT c;
    c.center = {0, 0, 2};
    c.radius = 1;
    c.normal = {0, 1, 0};
    return c;
}

double sampled_distance(const SegmentT& s, const CircleT& c, int ns, int nc) {
    auto [u, v] = c.frame();
    double best = 1e300;
    for (int i = 0; i <= ns; ++i) {
        Vec3 p = s.a + (s.b - s.a) * (static_cast<double>(i) / ns);
        for (int k = 0; k < nc; ++k) {
            double t = 2 * std::numbers::pi * k / nc;
            Vec3 q = c.center + (u * std::cos(t) + v * std::sin(t)) * c.radius;
            best = std::min(best, norm(p - q));
        }
    }
    return best;
}

}  // namespace

TEST(Distance, PointOnSegmentEnd) {
    EXPECT_EQ(distance(Vec3{0, 0, 0}, SegmentT{{0, 0, 0}, {0, 0, 1}}), 0.0);
}

TEST(Distance, CircleCenterToSpine) { EXPECT_NEAR(distance(Vec3{0, 0, 2}, pole_top()), 1.0, 1e-15); }

TEST(Distance, SegmentThroughPoleTopCircle) {
    SegmentT s{{0, -1, 2}, {0, 1, 2}};
    double d = distance(s, pole_top());
    EXPECT_NEAR(d, sampled_distance(s, pole_top(), 2000, 720), 1e-6);
    EXPECT_NEAR(d, 1.0, 1e-12);
}

TEST(Distance, SegmentCircleAgainstSampling) {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 40; ++i) {
        CircleT c;
        c.center = {u(g), u(g), u(g)};
        c.radius = 0.5 + std::abs(u(g));
        c.normal = normalized({u(g), u(g), u(g)});
        SegmentT s{{u(g), u(g), u(g)}, {u(g), u(g), u(g)}};
        double d = distance(s, c);
        double ref = sampled_distance(s, c, 400, 1440);
        // Sampling overestimates by at most the sample spacing.
        EXPECT_LE(d, ref + 1e-12);
        EXPECT_GE(d, ref - 2 * std::numbers::pi * c.radius / 1440 - norm(s.b - s.a) / 400);
    }
}

TEST(Distance, Symmetric) {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 200; ++i) {
        SegmentT a{{u(g), u(g), u(g)}, {u(g), u(g), u(g)}};
        SegmentT b{{u(g), u(g), u(g)}, {u(g), u(g), u(g)}};
        TriangleT t{{u(g), u(g), u(g)}, {u(g), u(g), u(g)}, {u(g), u(g), u(g)}};
        EXPECT_NEAR(distance(a, b), distance(b, a), 1e-12);
        EXPECT_GE(distance(a, t), 0.0);
        EXPECT_LE(distance(a, t), distance(a.a, t) + 1e-12);
    }
}

TEST(Distance, CoaxialCircles) {
    CircleT a = pole_top(), b = pole_top();
    b.center = {0, -0.5, 2};
    b.radius = 1.5;
    EXPECT_NEAR(distance(a, b), std::sqrt(0.25 + 0.25), 1e-12);
}

TEST(Distance, DegenerateShapes) {
    EXPECT_THROW(check_segment({{1, 1, 1}, {1, 1, 1}}), GeometryError);
    EXPECT_THROW(check_triangle({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}), GeometryError);
}

TEST(SegDisk, ThroughCenterIsPositive) {
    EXPECT_EQ(seg_disk_crossing({{0, -1, 2}, {0, 1, 2}}, DiskT{pole_top()}), Crossing::Plus);
    EXPECT_EQ(seg_disk_crossing({{0, 1, 2}, {0, -1, 2}}, DiskT{pole_top()}), Crossing::Minus);
}

TEST(SegDisk, NoPlaneCrossing) {
    EXPECT_EQ(seg_disk_crossing({{0, -2, 2}, {0.3, -0.6, 2.2}}, DiskT{pole_top()}), Crossing::None);
}

TEST(SegDisk, BoundaryIsDegenerate) {
    EXPECT_EQ(seg_disk_crossing({{1, -1, 2}, {1, 1, 2}}, DiskT{pole_top()}), Crossing::Degenerate);
    EXPECT_EQ(seg_disk_crossing({{0.2, 0, 2}, {0.4, 0, 2.1}}, DiskT{pole_top()}), Crossing::Degenerate);
}

TEST(SegDisk, MatchesPlaneArithmetic) {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 1000; ++i) {
        SegmentT s{{u(g), u(g), 2 + u(g)}, {u(g), u(g), 2 + u(g)}};
        // Oracle: the plane is y = 0 and the disk is x^2 + (z-2)^2 < 1.
        Crossing got = seg_disk_crossing(s, DiskT{pole_top()});
        if (got == Crossing::Degenerate) continue;
        int expect = 0;
        if ((s.a.y > 0) != (s.b.y > 0)) {
            double t = s.a.y / (s.a.y - s.b.y);
            Vec3 p = s.a + (s.b - s.a) * t;
            if (p.x * p.x + (p.z - 2) * (p.z - 2) < 1) expect = s.b.y > s.a.y ? 1 : -1;
        }
        EXPECT_EQ(crossing_sign(got), expect);
    }
}

TEST(TriangleClear, FarTriangle) {
    Obstacle o;
    o.kind = Obstacle::Kind::Segment;
    o.name = "pole";
    o.segment = {{0, 0, 0}, {0, 0, 1}};
    EXPECT_TRUE(triangle_clear({{20, 0, 0}, {21, 0, 0}, {20, 1, 0}}, {o}).ok);
}

TEST(TriangleClear, VertexOnHoopSpine) {
    Obstacle o;
    o.kind = Obstacle::Kind::Circle;
    o.name = "hoop";
    o.circle = pole_top();
    o.circle.tube_radius = 0.05;
    ClearReport r = triangle_clear({{1, 0, 2}, {3, 0, 2}, {3, 1, 2}}, {o});
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.obstacle, "hoop");
    EXPECT_LT(r.distance, 0.05 + kClearance);
}

TEST(TriangleClear, PiercedByPole) {
    SegmentT pole{{0, 0, 0}, {0, 0, 1}};
    TriangleT t{{-1, -1, 0.5}, {1, -1, 0.5}, {0, 1, 0.5}};
    ASSERT_TRUE(segment_intersects_triangle(pole, t));
    Obstacle o;
    o.kind = Obstacle::Kind::Segment;
    o.name = "pole";
    o.segment = pole;
    ClearReport r = triangle_clear(t, {o});
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.obstacle, "pole");
    EXPECT_EQ(r.distance, 0.0);
}

TEST(MinorSide, SixtyDegreeChord) {
    Circle2 c{{0, 0}, 1};
    Vec2 a{-0.5, std::sqrt(3.0) / 2}, b{0.5, std::sqrt(3.0) / 2};
    int s = select_minor_side(c, a, b);
    // Left of a->b is +y.
    EXPECT_EQ(s, 1);
    EXPECT_NEAR(oracle::arc_fraction(c.center, c.radius, a, b, s), 60.0 / 360.0, 1e-3);
}

TEST(MinorSide, NeverTheCenterSide) {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 2000; ++i) {
        Circle2 c{{4 * u(g) - 2, 4 * u(g) - 2}, 1 + 2 * u(g)};
        // Whole segment at most 1 long: chord plus both overhangs.
        double len = 0.01 + 0.89 * u(g);
        double half = std::asin(len / (2 * c.radius));
        double theta = 2 * std::numbers::pi * u(g);
        Vec2 p{c.center.x + c.radius * std::cos(theta - half), c.center.y + c.radius * std::sin(theta - half)};
        Vec2 q{c.center.x + c.radius * std::cos(theta + half), c.center.y + c.radius * std::sin(theta + half)};
        Vec2 d = q - p;
        double room = (1 / len - 1) / 2;
        Vec2 a = p - d * (room * (0.01 + 0.99 * u(g))), b = q + d * (room * (0.01 + 0.99 * u(g)));
        if (u(g) < 0.5) std::swap(a, b);
        int s = select_minor_side(c, a, b);
        EXPECT_EQ(s, -side_of(a, b, c.center));
    }
}

TEST(MinorSide, Preconditions) {
    Circle2 c{{0, 0}, 1};
    EXPECT_THROW(select_minor_side(c, {-2, 0}, {2, 0}), PreconditionError);    // chord is a diameter
    EXPECT_THROW(select_minor_side(c, {-3, 1}, {3, 1}), PreconditionError);    // tangent
    EXPECT_THROW(select_minor_side(c, {0.1, 0.95}, {2, 0.95}), PreconditionError);  // end inside
}

TEST(MinorSide, RotatingChordKeepsLabel) {
    Circle2 c{{0.3, -0.2}, 1.5};
    // Chord 0.768 long, segment 0.9 long.
    Vec2 a0{-0.45, 1.45}, b0{0.45, 1.45};
    int first = select_minor_side(c, a0 + c.center, b0 + c.center);
    for (int k = 1; k <= 360; ++k) {
        double t = 2 * std::numbers::pi * k / 360;
        auto rot = [&](const Vec2& p) {
            return Vec2{c.center.x + p.x * std::cos(t) - p.y * std::sin(t), c.center.y + p.x * std::sin(t) + p.y * std::cos(t)};
        };
        EXPECT_EQ(select_minor_side(c, rot(a0), rot(b0)), first) << "step " << k;
    }
}

TEST(LollipopSide, PoleCut) {
    Vec2 a{-0.5, 0.5}, b{0.5, 0.5};
    int s = select_lollipop_side(a, b);
    EXPECT_EQ(s, side_of(a, b, {0, 2}));
    EXPECT_EQ(s, oracle::lollipop_flood_side(a, b));
}

TEST(LollipopSide, CircleCut) {
    Vec2 a{-2, 2}, b{2, 2};
    int s = select_lollipop_side(a, b);
    EXPECT_EQ(s, 1);
    EXPECT_EQ(s, oracle::lollipop_flood_side(a, b));
}

TEST(LollipopSide, NoCut) {
    Vec2 a{-1, -5}, b{1, -5};
    int s = select_lollipop_side(a, b);
    EXPECT_EQ(s, -side_of(a, b, {0, 0}));
    EXPECT_EQ(s, -1);
}

TEST(LollipopSide, Preconditions) {
    EXPECT_THROW(select_lollipop_side({0, 2}, {3, 2}), PreconditionError);
    EXPECT_THROW(select_lollipop_side({-1, 0}, {1, 0}), PreconditionError);
    EXPECT_THROW(select_lollipop_side({0, 0.5}, {2, 0.5}), PreconditionError);
}

TEST(LollipopSide, RandomAgainstFloodFill) {
    std::mt19937_64 g(23);
    std::uniform_real_distribution<double> u(-3, 4);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        Vec2 a{u(g), u(g)}, b{u(g), u(g)};
        int s;
        try {
            s = select_lollipop_side(a, b);
        } catch (const PreconditionError&) {
            continue;
        }
        int expect = oracle::lollipop_flood_side(a, b);
        if (expect == 0) continue;
        ++checked;
        EXPECT_EQ(s, expect) << a.x << "," << a.y << " -> " << b.x << "," << b.y;
    }
    EXPECT_GT(checked, 100);
}
