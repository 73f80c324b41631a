#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "untangle/scene.hpp"

using namespace untangle;

namespace {

const RigidPiece& piece(const Scene& s, const std::string& id) {
    for (const RigidPiece& p : s.pieces)
        if (p.id == id) return p;
    throw std::runtime_error("no piece " + id);
}

bool has_tag(const Scene& s, const std::string& tag) {
    return std::find(s.regime_tags.begin(), s.regime_tags.end(), tag) != s.regime_tags.end();
}

// Signed crossings through the disk x^2 + z^2 < r^2 of the plane y = 0.
int y_disk_index(const PolyRope& rope, double r) {
    int sum = 0;
    for (size_t i = 0; i < rope.edge_count(); ++i) {
        SegmentT e = rope.edge(i);
        if ((e.a.y > 0) == (e.b.y > 0)) continue;
        double t = e.a.y / (e.a.y - e.b.y);
        Vec3 p = e.a + (e.b - e.a) * t;
        if (p.x * p.x + p.z * p.z < r * r) sum += e.b.y > e.a.y ? 1 : -1;
    }
    return sum;
}

}  // namespace

TEST(ModelA, Coordinates) {
    Scene s = build_model_a(1.5);
    const RigidPiece& lol = piece(s, "lollipop");
    EXPECT_EQ(lol.segment->a, (Vec3{0, 0, 0}));
    EXPECT_EQ(lol.segment->b, (Vec3{0, 0, 1}));
    EXPECT_EQ(lol.circle->center, (Vec3{0, 0, 2}));
    EXPECT_EQ(lol.circle->radius, 1.0);
    EXPECT_EQ(lol.circle->normal, (Vec3{0, 1, 0}));
    const RigidPiece& hoop = piece(s, "hoop");
    EXPECT_TRUE(hoop.movable);
    EXPECT_EQ(hoop.circle->center, (Vec3{0, -0.5, 2}));
    EXPECT_EQ(hoop.circle->radius, 1.5);
    ASSERT_EQ(s.ropes.size(), 1u);
    std::vector<Vec3> rope{{0, -1, 0}, {0, -1, 2}, {0, 1, 2}, {0, 1, 0}};
    EXPECT_EQ(s.ropes[0].vertices, rope);
    EXPECT_EQ(s.goal.target.center, (Vec3{0, 0.5, 2}));
    ASSERT_EQ(s.forbidden_planes.size(), 1u);
    EXPECT_EQ(s.forbidden_planes[0].normal, (Vec3{0, 0, 1}));
    EXPECT_TRUE(has_tag(s, "paper-impossible"));
}

TEST(ModelA, Regimes) {
    EXPECT_FALSE(has_tag(build_model_a(0.5), "paper-impossible"));
    EXPECT_TRUE(has_tag(build_model_a(1.0), "paper-impossible"));
    EXPECT_THROW(build_model_a(2.5), ParameterError);
    EXPECT_THROW(build_model_a(0), ParameterError);
}

TEST(ModelA, MirrorOfGoal) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.01, 1.99);
    for (int i = 0; i < 100; ++i) {
        Scene s = build_model_a(u(g));
        const CircleT& h = *piece(s, "hoop").circle;
        const CircleT& t = s.goal.target;
        EXPECT_EQ(h.center.x, t.center.x);
        EXPECT_EQ(h.center.y, -t.center.y);
        EXPECT_EQ(h.center.z, t.center.z);
        EXPECT_EQ(h.radius, t.radius);
    }
}

TEST(ModelA, LegalAndGoal) {
    for (double r : {0.5, 1.0, 1.5, 1.9}) EXPECT_TRUE(is_legal(build_model_a(r)).ok) << r;
    Scene s = build_model_a(1.5);
    EXPECT_FALSE(goal_reached(s));
    for (RigidPiece& p : s.pieces)
        if (p.id == "hoop") p.circle->center = {0, 0.5, 2};
    EXPECT_TRUE(goal_reached(s));
}

TEST(ModelA, RopeOnPoleIsIllegal) {
    Scene s = build_model_a(1.5);
    s.ropes[0].vertices[1] = {0, 0, 0.5};
    LegalityReport r = is_legal(s);
    ASSERT_FALSE(r.ok);
    bool names_pole = false;
    for (const Violation& v : r.violations)
        if (v.obstacle == "lollipop" || v.obstacle.find("pole") != std::string::npos) names_pole = true;
    EXPECT_TRUE(names_pole);
}

TEST(ModelB, IndexAndTags) {
    Scene s = build_model_b(1, 1, 1, 0.5);
    EXPECT_TRUE(has_tag(s, "paper-impossible"));
    EXPECT_EQ(y_disk_index(s.ropes[0], 1), 1);
    Scene s2 = build_model_b(2, 2, 1, 1);
    EXPECT_TRUE(has_tag(s2, "paper-impossible"));
    EXPECT_EQ(y_disk_index(s2.ropes[0], 1), 1);
    Scene s3 = build_model_b(0.5, 2, 1, 1);
    EXPECT_TRUE(has_tag(s3, "hypothesis-violated"));
    EXPECT_THROW(build_model_b(1, 1, 1, 0), ParameterError);
    for (const Scene& x : {s, s2, s3}) EXPECT_TRUE(is_legal(x).ok);
}

TEST(ModelB, SeparatedAssembly) {
    Scene s = build_model_b(1, 1, 1, 0.5);
    EXPECT_FALSE(goal_reached(s));
    const Vec3 shift{100, 0, 0};
    for (RigidPiece& p : s.pieces) {
        if (p.id == "hoop") continue;
        if (p.circle) p.circle->center += shift;
        for (Attachment& a : p.attachments) a.point += shift;
    }
    for (Vec3& v : s.ropes[0].vertices) v += shift;
    for (Vec3& v : s.ropes[0].pinned) v += shift;
    EXPECT_TRUE(goal_reached(s));
}

TEST(ModelC, TagsAndLegality) {
    Scene a = build_model_c(1, 0.05, 1.0);
    EXPECT_TRUE(has_tag(a, "paper-impossible"));
    EXPECT_TRUE(is_legal(a).ok);
    EXPECT_FALSE(goal_reached(a));
    Scene b = build_model_c(1, 0.05, 3.0);
    EXPECT_FALSE(has_tag(b, "paper-impossible"));
    EXPECT_TRUE(is_legal(b).ok);
    EXPECT_THROW(build_model_c(1, 0.05, 0.2), ParameterError);
    EXPECT_THROW(build_model_c(1, 1.5, 3.0), ParameterError);
}

TEST(ModelC, GaussLinking) {
    Scene s = build_model_c(1, 0.05, 1.0);
    auto spine = [&](const std::string& id) { return oracle::circle(piece(s, id).circle->center, piece(s, id).circle->normal, piece(s, id).circle->radius, 256); };
    auto rope = [&](const std::string& id) {
        for (const PolyRope& r : s.ropes)
            if (r.id == id) return r.vertices;
        throw std::runtime_error("no rope");
    };
    EXPECT_NEAR(std::abs(oracle::gauss_linking(rope("rope1"), spine("hoop1"))), 1.0, 1e-6);
    EXPECT_NEAR(std::abs(oracle::gauss_linking(rope("rope2"), spine("hoop2"))), 1.0, 1e-6);
    EXPECT_NEAR(oracle::gauss_linking(spine("hoop1"), spine("hoop2")), 0.0, 1e-6);
    EXPECT_NEAR(oracle::gauss_linking(rope("rope1"), rope("rope2")), 0.0, 1e-6);
    EXPECT_NEAR(oracle::gauss_linking(rope("rope1"), spine("hoop2")), 0.0, 1e-6);
    EXPECT_NEAR(oracle::gauss_linking(rope("rope2"), spine("hoop1")), 0.0, 1e-6);
}

TEST(ModelC, BudgetViolation) {
    Scene s = build_model_c(1, 0.05, 1.0);
    s.ropes[0].length_budget = s.ropes[0].perimeter() * 0.99;
    LegalityReport r = is_legal(s);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.violations[0].obstacle, "budget");
}

TEST(Serialization, RoundTripExact) {
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(0.01, 1.99);
    for (int i = 0; i < 50; ++i) {
        Scene s = build_model_a(u(g));
        Scene back = parse_scene(serialize(s));
        EXPECT_TRUE(back == s);
        EXPECT_EQ(serialize(back), serialize(s));
    }
    for (const Scene& s : {build_model_b(1.3, 1.7, 1, 0.4), build_model_c(1.2, 0.07, 2.0)}) {
        EXPECT_TRUE(parse_scene(serialize(s)) == s);
    }
}

TEST(Serialization, FieldNames) {
    nlohmann::json j = to_json(build_model_c(1, 0.05, 3.0));
    for (const char* k : {"version", "model_tag", "clearance", "pieces", "ropes", "forbidden_planes", "goal", "regime_tags"})
        EXPECT_TRUE(j.contains(k)) << k;
    for (const char* k : {"id", "kind", "movable", "geometry", "attachments"}) EXPECT_TRUE(j["pieces"][0].contains(k)) << k;
    for (const char* k : {"id", "closed", "pinned", "length_budget", "vertices"}) EXPECT_TRUE(j["ropes"][0].contains(k)) << k;
}

TEST(Serialization, MalformedInput) {
    EXPECT_THROW(parse_scene("{"), ParseError);
    EXPECT_THROW(parse_scene("{\"version\": 1}"), ParseError);
}

TEST(Hash, StableAndSensitive) {
    Scene a = build_model_a(1.5);
    EXPECT_EQ(scene_hash(a), scene_hash(build_model_a(1.5)));
    EXPECT_EQ(scene_hash(a), sha256_hex(serialize(a)));
    EXPECT_EQ(scene_hash(a).size(), 64u);
    EXPECT_NE(scene_hash(a), scene_hash(build_model_a(1.4)));
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
