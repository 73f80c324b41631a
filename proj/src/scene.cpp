#include "untangle/scene.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "untangle/convex.hpp"

namespace untangle {

using nlohmann::json;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
}  // namespace

Vec3 RigidPiece::reference() const {
    if (circle) return circle->center;
    return (segment->a + segment->b) * 0.5;
}

double RigidPiece::circumradius() const {
    Vec3 ref = reference();
    double r = 0;
    if (circle) r = std::max(r, norm(circle->center - ref) + circle->radius + circle->tube_radius);
    if (segment) r = std::max({r, norm(segment->a - ref), norm(segment->b - ref)});
    return r;
}

double PolyRope::perimeter() const {
    double p = 0;
    for (size_t i = 0; i < edge_count(); ++i) p += norm(edge(i).b - edge(i).a);
    return p;
}

const RigidPiece* Scene::find_piece(const std::string& id) const {
    for (const auto& p : pieces)
        if (p.id == id) return &p;
    return nullptr;
}
RigidPiece* Scene::find_piece(const std::string& id) {
    for (auto& p : pieces)
        if (p.id == id) return &p;
    return nullptr;
}
const PolyRope* Scene::find_rope(const std::string& id) const {
    for (const auto& r : ropes)
        if (r.id == id) return &r;
    return nullptr;
}
PolyRope* Scene::find_rope(const std::string& id) {
    for (auto& r : ropes)
        if (r.id == id) return &r;
    return nullptr;
}
bool Scene::has_tag(const std::string& tag) const {
    return std::find(regime_tags.begin(), regime_tags.end(), tag) != regime_tags.end();
}

// ---------------------------------------------------------------- builders

Scene build_model_a(double r) {
    if (!(r > 0 && r < 2)) throw ParameterError("modelA: hoop radius must satisfy 0 < r < 2");
    Scene s;
    s.model_tag = "modelA";
    RigidPiece lolly;
    lolly.id = "lollipop";
    lolly.kind = PieceKind::Lollipop;
    lolly.segment = SegmentT{{0, 0, 0}, {0, 0, 1}};
    lolly.circle = CircleT{{0, 0, 2}, 1, {0, 1, 0}, 0};
    RigidPiece hoop;
    hoop.id = "hoop";
    hoop.kind = PieceKind::Circle;
    hoop.circle = CircleT{{0, -0.5, 2}, r, {0, 1, 0}, 0};
    hoop.movable = true;
    s.pieces = {lolly, hoop};
    PolyRope rope;
    rope.id = "rope";
    rope.vertices = {{0, -1, 0}, {0, -1, 2}, {0, 1, 2}, {0, 1, 0}};
    rope.pinned = {{0, -1, 0}, {0, 1, 0}};
    s.ropes = {rope};
    s.forbidden_planes = {PlaneT{{0, 0, 0}, {0, 0, 1}}};
    s.goal.type = Goal::Type::Pose;
    s.goal.piece = "hoop";
    s.goal.target = CircleT{{0, 0.5, 2}, r, {0, 1, 0}, 0};
    if (r >= 1) s.regime_tags.push_back("paper-impossible");
    if (!is_legal(s).ok) throw ParameterError("modelA: hoop radius below the clearance");
    return s;
}

Scene build_model_b(double r_left, double r_right, double r_hoop, double rope_slack) {
    if (!(r_left > 0 && r_right > 0 && r_hoop > 0)) throw ParameterError("modelB: radii must be positive");
    if (!(rope_slack > 0)) throw ParameterError("modelB: rope_slack must be positive");
    const double d = 1 + rope_slack;
    Scene s;
    s.model_tag = "modelB";
    RigidPiece hoop;
    hoop.id = "hoop";
    hoop.circle = CircleT{{0, 0, 0}, r_hoop, {0, 1, 0}, 0};
    RigidPiece left;
    left.id = "left";
    left.circle = CircleT{{0, -d, 0}, r_left, {0, 1, 0}, 0};
    left.movable = true;
    left.attachments = {{"rope", "start", {0, -d, r_left}}};
    RigidPiece right;
    right.id = "right";
    right.circle = CircleT{{0, d, 0}, r_right, {0, 1, 0}, 0};
    right.movable = true;
    right.attachments = {{"rope", "end", {0, d, r_right}}};
    s.pieces = {hoop, left, right};
    PolyRope rope;
    rope.id = "rope";
    rope.vertices = {{0, -d, r_left}, {0, -d / 2, 0}, {0, d / 2, 0}, {0, d, r_right}};
    s.ropes = {rope};
    s.goal.type = Goal::Type::Separation;
    s.goal.groups = {{"hoop"}, {"left", "right", "rope"}};
    if (r_left < r_hoop || r_right < r_hoop)
        s.regime_tags.push_back("hypothesis-violated");
    else
        s.regime_tags.push_back("paper-impossible");
    if (!is_legal(s).ok) throw ParameterError("modelB: parameters give an illegal scene");
    return s;
}

double ModelCLayout::hoop2_low() const { return zc - std::sqrt(r_hoop * r_hoop - y2 * y2); }

ModelCLayout model_c_layout(double r_hoop, double tube) {
    ModelCLayout L{};
    L.r_hoop = r_hoop;
    L.tube = tube;
    L.h = tube + 0.008;
    L.g = L.h + 0.022;
    L.zc = r_hoop - (L.h + tube + 0.02);
    L.y2 = -(tube + 0.01);
    L.a2 = tube + 0.01;
    L.b2 = tube + 0.04;
    return L;
}

Scene build_model_c(double r_hoop, double tube, double rope_length) {
    if (!(tube > 0 && tube < r_hoop)) throw ParameterError("modelC: need 0 < tube < r_hoop");
    if (!(rope_length > 2 * kPi * tube)) throw ParameterError("modelC: rope_length too short to close around the tube");
    const ModelCLayout L = model_c_layout(r_hoop, tube);
    const double R = r_hoop;
    Scene s;
    s.model_tag = "modelC";
    RigidPiece h1;
    h1.id = "hoop1";
    h1.circle = CircleT{{0, 0, 0}, R, {0, 0, 1}, tube};
    h1.movable = true;
    RigidPiece h2;
    h2.id = "hoop2";
    h2.circle = CircleT{L.hoop2_center(), R, {1, 0, 0}, tube};
    s.pieces = {h1, h2};

    // Rope 1: stadium around hoop1's tube at (R,0,0), poking through hoop2's disk.
    PolyRope r1;
    r1.id = "rope1";
    r1.closed = true;
    r1.length_budget = rope_length;
    const Vec3 c0{R, 0, 0}, c1{R + L.g - L.h + 0.012, 0, 0};
    const int m = 12;
    for (int k = 0; k <= m; ++k) {
        double a = kPi / 2 + kPi * k / m;
        r1.vertices.push_back(c0 + Vec3{std::cos(a), 0, std::sin(a)} * L.h);
    }
    for (int k = 0; k <= m; ++k) {
        double a = -kPi / 2 + kPi * k / m;
        r1.vertices.push_back(c1 + Vec3{std::cos(a), 0, std::sin(a)} * L.h);
    }
    // Rope 2: ellipse around hoop2's lowest stretch, clasping rope 1's lower side.
    PolyRope r2;
    r2.id = "rope2";
    r2.closed = true;
    r2.length_budget = rope_length;
    const Vec3 e0{R + L.g, L.y2, L.hoop2_low()};
    for (int k = 0; k < 20; ++k) {
        double t = 2 * kPi * k / 20;
        r2.vertices.push_back(e0 + Vec3{L.a2 * std::cos(t), 0, L.b2 * std::sin(t)});
    }
    s.ropes = {r1, r2};
    s.goal.type = Goal::Type::Separation;
    s.goal.groups = {{"hoop1", "rope1"}, {"hoop2", "rope2"}};
    if (rope_length <= r_hoop) s.regime_tags.push_back("paper-impossible");

    if (std::max(r1.perimeter(), r2.perimeter()) > rope_length)
        throw ParameterError("modelC: rope_length too short for the canonical tangle");
    LegalityReport rep = is_legal(s);
    if (!rep.ok) throw ParameterError("modelC: canonical tangle is illegal for these parameters: " + rep.violations.front().message());
    if (group_gap(s, s.goal.groups[0], s.goal.groups[1]) > 0)
        throw ParameterError("modelC: canonical tangle came out separable");
    return s;
}

// ---------------------------------------------------------------- legality

bool ContactPolicy::rope_vs_piece(const Scene& s, const PolyRope&, const RigidPiece& p) const {
    if (s.model_tag == "modelB") return p.id == "hoop";
    return true;
}
bool ContactPolicy::rope_vs_rope(const Scene& s) const { return s.model_tag != "modelB"; }
bool ContactPolicy::rope_self(const Scene& s) const { return s.model_tag != "modelB"; }
bool ContactPolicy::piece_vs_piece(const Scene& s, const RigidPiece& a, const RigidPiece& b) const {
    if (!a.movable && !b.movable) return false;
    if (s.model_tag == "modelB") return a.id == "hoop" || b.id == "hoop";
    return true;
}

std::string Violation::message() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", distance);
    std::string m = subject + ": " + what;
    if (!obstacle.empty()) m += " (" + obstacle + ", distance " + buf + ")";
    return m;
}

std::vector<PiecePart> parts_of(const RigidPiece& p) {
    std::vector<PiecePart> out;
    if (p.kind == PieceKind::Lollipop) {
        out.push_back({p.id + ".pole", p.segment, std::nullopt});
        out.push_back({p.id + ".circle", std::nullopt, p.circle});
    } else if (p.segment) {
        out.push_back({p.id, p.segment, std::nullopt});
    } else {
        out.push_back({p.id, std::nullopt, p.circle});
    }
    return out;
}

namespace {

double seg_part_distance(const SegmentT& s, const PiecePart& part) {
    if (part.segment) return distance(s, *part.segment);
    return distance(s, *part.circle) - part.circle->tube_radius;
}

double part_part_distance(const PiecePart& a, const PiecePart& b) {
    if (a.segment && b.segment) return distance(*a.segment, *b.segment);
    if (a.segment) return distance(*a.segment, *b.circle) - b.circle->tube_radius;
    if (b.segment) return distance(*b.segment, *a.circle) - a.circle->tube_radius;
    return distance(*a.circle, *b.circle) - a.circle->tube_radius - b.circle->tube_radius;
}

// Cheap lower bound for segment-to-part distance, used to skip exact work.
double seg_part_lower(const SegmentT& s, const PiecePart& part) {
    if (part.segment) return 0;
    const CircleT& c = *part.circle;
    double dc = distance(c.center, s);
    double far = std::max(norm(s.a - c.center), norm(s.b - c.center));
    double ha = dot(s.a - c.center, c.normal), hb = dot(s.b - c.center, c.normal);
    double plane_gap = (ha > 0 && hb > 0) || (ha < 0 && hb < 0) ? std::min(std::abs(ha), std::abs(hb)) : 0.0;
    return std::max({dc - c.radius, c.radius - far, plane_gap}) - c.tube_radius;
}

// Distance between the bounding boxes of two segments.
double seg_box_lower(const SegmentT& s, const SegmentT& t) {
    auto gap = [](double a0, double a1, double b0, double b1) {
        return std::max({0.0, std::min(b0, b1) - std::max(a0, a1), std::min(a0, a1) - std::max(b0, b1)});
    };
    double gx = gap(s.a.x, s.b.x, t.a.x, t.b.x), gy = gap(s.a.y, s.b.y, t.a.y, t.b.y), gz = gap(s.a.z, s.b.z, t.a.z, t.b.z);
    return std::sqrt(gx * gx + gy * gy + gz * gz);
}

bool adjacent_edges(const PolyRope& r, size_t i, size_t j) {
    if (i == j) return true;
    size_t n = r.edge_count();
    if (i + 1 == j || j + 1 == i) return true;
    if (r.closed && ((i == 0 && j == n - 1) || (j == 0 && i == n - 1))) return true;
    return false;
}

}  // namespace

double rope_segment_clearance(const Scene& s, const PolyRope& r, size_t edge, std::string* nearest) {
    ContactPolicy pol;
    const SegmentT seg = r.edge(edge);
    const double delta = s.clearance;
    const double pin_ball = kPinBallFactor * delta;
    double best = kInf;
    auto note = [&](double d, const std::string& name) {
        if (d < best) {
            best = d;
            if (nearest) *nearest = name;
        }
    };
    for (const RigidPiece& p : s.pieces) {
        if (!pol.rope_vs_piece(s, r, p)) continue;
        for (const PiecePart& part : parts_of(p)) {
            if (seg_part_lower(seg, part) >= std::min(best, 4 * delta)) continue;
            note(seg_part_distance(seg, part), part.name);
        }
    }
    if (pol.rope_vs_rope(s)) {
        for (const PolyRope& o : s.ropes) {
            if (o.id == r.id) continue;
            for (size_t k = 0; k < o.edge_count(); ++k) {
                if (seg_box_lower(seg, o.edge(k)) >= std::min(best, 4 * delta)) continue;
                note(distance(seg, o.edge(k)), o.id);
            }
        }
    }
    if (pol.rope_self(s)) {
        for (size_t k = 0; k < r.edge_count(); ++k) {
            if (adjacent_edges(r, edge, k) || seg_box_lower(seg, r.edge(k)) >= std::min(best, 4 * delta)) continue;
            note(distance(seg, r.edge(k)), r.id + " (self)");
        }
    }
    for (size_t pi = 0; pi < s.forbidden_planes.size(); ++pi) {
        const PlaneT& pl = s.forbidden_planes[pi];
        double h;
        bool pinned_start = !r.closed && !r.pinned.empty() && edge == 0;
        bool pinned_end = !r.closed && r.pinned.size() == 2 && edge == r.edge_count() - 1;
        if (pinned_start && pinned_end) {
            h = std::min(plane_height_outside_ball(seg, pl, r.pinned[0], pin_ball),
                         plane_height_outside_ball(seg, pl, r.pinned[1], pin_ball));
        } else if (pinned_start) {
            h = plane_height_outside_ball(seg, pl, r.pinned[0], pin_ball);
        } else if (pinned_end) {
            h = plane_height_outside_ball(seg, pl, r.pinned[1], pin_ball);
        } else {
            h = plane_height(seg, pl);
        }
        note(h, "plane" + std::to_string(pi));
    }
    return best;
}

double piece_clearance(const Scene& s, const RigidPiece& p, std::string* nearest) {
    ContactPolicy pol;
    double best = kInf;
    auto note = [&](double d, const std::string& name) {
        if (d < best) {
            best = d;
            if (nearest) *nearest = name;
        }
    };
    for (const RigidPiece& o : s.pieces) {
        if (o.id == p.id || !pol.piece_vs_piece(s, p, o)) continue;
        for (const PiecePart& a : parts_of(p))
            for (const PiecePart& b : parts_of(o)) note(part_part_distance(a, b), b.name);
    }
    if (p.movable) {
        for (size_t pi = 0; pi < s.forbidden_planes.size(); ++pi) {
            const PlaneT& pl = s.forbidden_planes[pi];
            for (const PiecePart& a : parts_of(p)) {
                double h = a.segment ? plane_height(*a.segment, pl) : plane_height(*a.circle, pl) - a.circle->tube_radius;
                note(h, "plane" + std::to_string(pi));
            }
        }
    }
    return best;
}

LegalityReport is_legal(const Scene& s) {
    LegalityReport rep;
    auto add = [&](Violation v) {
        rep.ok = false;
        rep.violations.push_back(std::move(v));
    };
    for (const PolyRope& r : s.ropes) {
        if (r.vertices.size() < (r.closed ? 3u : 2u)) {
            add({r.id, "", 0, "too few vertices"});
            continue;
        }
        for (size_t i = 0; i < r.edge_count(); ++i) {
            if (norm(r.edge(i).b - r.edge(i).a) <= kEps) add({r.id, "", 0, "zero-length edge " + std::to_string(i)});
        }
        if (!r.closed && !r.pinned.empty()) {
            if (!(r.vertices.front() == r.pinned.front())) add({r.id, "", 0, "start moved off its pinned point"});
            if (r.pinned.size() > 1 && !(r.vertices.back() == r.pinned.back()))
                add({r.id, "", 0, "end moved off its pinned point"});
        }
        if (r.length_budget && r.perimeter() > *r.length_budget)
            add({r.id, "budget", r.perimeter(), "perimeter exceeds length budget"});
        for (size_t i = 0; i < r.edge_count(); ++i) {
            std::string name;
            double d = rope_segment_clearance(s, r, i, &name);
            if (d < s.clearance) add({r.id + " edge " + std::to_string(i), name, d, "too close"});
        }
    }
    for (const RigidPiece& p : s.pieces) {
        for (const Attachment& a : p.attachments) {
            const PolyRope* r = s.find_rope(a.rope);
            if (!r) {
                add({p.id, a.rope, 0, "attachment to a missing rope"});
                continue;
            }
            const Vec3& v = a.end == "start" ? r->vertices.front() : r->vertices.back();
            if (norm(v - a.point) > kEps) add({p.id, a.rope, norm(v - a.point), "rope end detached"});
        }
        std::string name;
        double d = piece_clearance(s, p, &name);
        if (d < s.clearance) add({p.id, name, d, "too close"});
    }
    return rep;
}

// ---------------------------------------------------------------- goals

namespace {
Support group_support(const Scene& s, const std::vector<std::string>& ids) {
    std::vector<Support> parts;
    for (const std::string& id : ids) {
        if (const RigidPiece* p = s.find_piece(id)) {
            for (const PiecePart& part : parts_of(*p)) {
                if (part.segment)
                    parts.push_back(support_points({part.segment->a, part.segment->b}));
                else
                    parts.push_back(support_disk(*part.circle));
            }
        } else if (const PolyRope* r = s.find_rope(id)) {
            parts.push_back(support_points(r->vertices));
        } else {
            throw ParseError("goal group names unknown id '" + id + "'");
        }
    }
    return support_union(std::move(parts));
}
}  // namespace

double group_gap(const Scene& s, const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return convex_distance(group_support(s, a), group_support(s, b));
}

bool goal_reached(const Scene& s) {
    if (s.goal.type == Goal::Type::Pose) {
        const RigidPiece* p = s.find_piece(s.goal.piece);
        if (!p || !p->circle) return false;
        const CircleT& c = *p->circle;
        const CircleT& t = s.goal.target;
        const double tol = 1e-6;
        bool normal_ok = norm(c.normal - t.normal) <= tol || norm(c.normal + t.normal) <= tol;
        return norm(c.center - t.center) <= tol && std::abs(c.radius - t.radius) <= tol && normal_ok;
    }
    if (s.goal.groups.size() != 2) return false;
    // A plane at distance >= clearance from both groups exists iff the hulls are 2*clearance apart.
    return group_gap(s, s.goal.groups[0], s.goal.groups[1]) >= 2 * s.clearance;
}

// ---------------------------------------------------------------- JSON

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 json_vec(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
    for (const auto& e : j)
        if (!e.is_number()) throw ParseError("expected numeric coordinates");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace {

const char* kind_name(PieceKind k) {
    switch (k) {
        case PieceKind::PoleSegment: return "pole_segment";
        case PieceKind::Circle: return "circle";
        case PieceKind::Lollipop: return "lollipop";
    }
    return "circle";
}

PieceKind kind_from(const std::string& s) {
    if (s == "pole_segment") return PieceKind::PoleSegment;
    if (s == "circle") return PieceKind::Circle;
    if (s == "lollipop") return PieceKind::Lollipop;
    throw ParseError("unknown piece kind '" + s + "'");
}

json circle_json(const CircleT& c) {
    return {{"center", vec_json(c.center)}, {"radius", c.radius}, {"normal", vec_json(c.normal)}, {"tube_radius", c.tube_radius}};
}

CircleT json_circle(const json& j) {
    CircleT c;
    c.center = json_vec(j.at("center"));
    c.radius = j.at("radius").get<double>();
    c.normal = json_vec(j.at("normal"));
    c.tube_radius = j.value("tube_radius", 0.0);
    if (!(c.radius > c.tube_radius && c.tube_radius >= 0)) throw ParseError("circle needs radius > tube_radius >= 0");
    if (std::abs(norm(c.normal) - 1) > 1e-9) throw ParseError("circle normal must be a unit vector");
    return c;
}

}  // namespace

json to_json(const Scene& s) {
    json j;
    j["version"] = s.version;
    j["model_tag"] = s.model_tag;
    j["clearance"] = s.clearance;
    j["pieces"] = json::array();
    for (const RigidPiece& p : s.pieces) {
        json g = json::object();
        if (p.segment) g["segment"] = {{"a", vec_json(p.segment->a)}, {"b", vec_json(p.segment->b)}};
        if (p.circle) g["circle"] = circle_json(*p.circle);
        json att = json::array();
        for (const Attachment& a : p.attachments) att.push_back({{"rope", a.rope}, {"end", a.end}, {"point", vec_json(a.point)}});
        j["pieces"].push_back({{"id", p.id}, {"kind", kind_name(p.kind)}, {"movable", p.movable}, {"geometry", g}, {"attachments", att}});
    }
    j["ropes"] = json::array();
    for (const PolyRope& r : s.ropes) {
        json v = json::array(), pin = json::array();
        for (const Vec3& p : r.vertices) v.push_back(vec_json(p));
        for (const Vec3& p : r.pinned) pin.push_back(vec_json(p));
        json budget = r.length_budget ? json(*r.length_budget) : json(nullptr);
        j["ropes"].push_back({{"id", r.id}, {"closed", r.closed}, {"pinned", pin}, {"length_budget", budget}, {"vertices", v}});
    }
    j["forbidden_planes"] = json::array();
    for (const PlaneT& p : s.forbidden_planes) j["forbidden_planes"].push_back({{"point", vec_json(p.point)}, {"normal", vec_json(p.normal)}});
    if (s.goal.type == Goal::Type::Pose) {
        j["goal"] = {{"type", "pose"},
                     {"piece", s.goal.piece},
                     {"center", vec_json(s.goal.target.center)},
                     {"radius", s.goal.target.radius},
                     {"normal", vec_json(s.goal.target.normal)}};
    } else {
        j["goal"] = {{"type", "separation"}, {"groups", s.goal.groups}};
    }
    j["regime_tags"] = s.regime_tags;
    return j;
}

Scene scene_from_json(const json& j) {
    try {
        Scene s;
        s.version = j.at("version").get<int>();
        if (s.version != 1) throw ParseError("unsupported scene version " + std::to_string(s.version));
        s.model_tag = j.at("model_tag").get<std::string>();
        s.clearance = j.at("clearance").get<double>();
        for (const json& pj : j.at("pieces")) {
            RigidPiece p;
            p.id = pj.at("id").get<std::string>();
            p.kind = kind_from(pj.at("kind").get<std::string>());
            p.movable = pj.at("movable").get<bool>();
            const json& g = pj.at("geometry");
            if (g.contains("segment")) {
                p.segment = SegmentT{json_vec(g["segment"].at("a")), json_vec(g["segment"].at("b"))};
                check_segment(*p.segment);
            }
            if (g.contains("circle")) p.circle = json_circle(g["circle"]);
            bool ok = (p.kind == PieceKind::Lollipop && p.segment && p.circle) ||
                      (p.kind == PieceKind::PoleSegment && p.segment && !p.circle) ||
                      (p.kind == PieceKind::Circle && p.circle && !p.segment);
            if (!ok) throw ParseError("piece '" + p.id + "' geometry does not match its kind");
            for (const json& a : pj.value("attachments", json::array()))
                p.attachments.push_back({a.at("rope").get<std::string>(), a.at("end").get<std::string>(), json_vec(a.at("point"))});
            s.pieces.push_back(std::move(p));
        }
        for (const json& rj : j.at("ropes")) {
            PolyRope r;
            r.id = rj.at("id").get<std::string>();
            r.closed = rj.at("closed").get<bool>();
            for (const json& p : rj.at("pinned")) r.pinned.push_back(json_vec(p));
            if (!rj.at("length_budget").is_null()) r.length_budget = rj["length_budget"].get<double>();
            for (const json& p : rj.at("vertices")) r.vertices.push_back(json_vec(p));
            if (r.vertices.size() < 2) throw ParseError("rope '" + r.id + "' needs at least two vertices");
            s.ropes.push_back(std::move(r));
        }
        for (const json& pl : j.at("forbidden_planes")) s.forbidden_planes.push_back({json_vec(pl.at("point")), json_vec(pl.at("normal"))});
        const json& g = j.at("goal");
        std::string type = g.at("type").get<std::string>();
        if (type == "pose") {
            s.goal.type = Goal::Type::Pose;
            s.goal.piece = g.at("piece").get<std::string>();
            s.goal.target.center = json_vec(g.at("center"));
            s.goal.target.radius = g.at("radius").get<double>();
            s.goal.target.normal = json_vec(g.at("normal"));
        } else if (type == "separation") {
            s.goal.type = Goal::Type::Separation;
            s.goal.groups = g.at("groups").get<std::vector<std::vector<std::string>>>();
        } else {
            throw ParseError("unknown goal type '" + type + "'");
        }
        s.regime_tags = j.at("regime_tags").get<std::vector<std::string>>();
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene: ") + e.what());
    } catch (const GeometryError& e) {
        throw ParseError(std::string("scene: ") + e.what());
    }
}

std::string serialize(const Scene& s) { return to_json(s).dump(); }

Scene parse_scene(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene: ") + e.what());
    }
    return scene_from_json(j);
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

void save_scene(const Scene& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << to_json(s).dump(2) << "\n";
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string scene_hash(const Scene& s) { return sha256_hex(serialize(s)); }

// ---------------------------------------------------------------- equality

bool operator==(const SegmentT& a, const SegmentT& b) { return a.a == b.a && a.b == b.b; }
bool operator==(const CircleT& a, const CircleT& b) {
    return a.center == b.center && a.radius == b.radius && a.normal == b.normal && a.tube_radius == b.tube_radius;
}
bool operator==(const PlaneT& a, const PlaneT& b) { return a.point == b.point && a.normal == b.normal; }
bool operator==(const RigidPiece& a, const RigidPiece& b) {
    return a.id == b.id && a.kind == b.kind && a.segment == b.segment && a.circle == b.circle && a.movable == b.movable &&
           a.attachments == b.attachments;
}
bool operator==(const PolyRope& a, const PolyRope& b) {
    return a.id == b.id && a.vertices == b.vertices && a.closed == b.closed && a.pinned == b.pinned &&
           a.length_budget == b.length_budget;
}
bool operator==(const Goal& a, const Goal& b) {
    if (a.type != b.type) return false;
    if (a.type == Goal::Type::Pose)
        return a.piece == b.piece && a.target.center == b.target.center && a.target.radius == b.target.radius &&
               a.target.normal == b.target.normal;
    return a.groups == b.groups;
}
bool operator==(const Scene& a, const Scene& b) {
    return a.version == b.version && a.model_tag == b.model_tag && a.clearance == b.clearance && a.pieces == b.pieces &&
           a.ropes == b.ropes && a.forbidden_planes == b.forbidden_planes && a.goal == b.goal &&
           a.regime_tags == b.regime_tags;
}

}  // namespace untangle
