#include "untangle/moves.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

namespace untangle {

using nlohmann::json;

std::string MoveCheck::message() const {
    if (ok) return "ok";
    std::string m;
    for (const Violation& v : violations) {
        if (!m.empty()) m += "; ";
        m += v.message();
    }
    return m;
}

namespace {

const PolyRope& rope_or_throw(const Scene& s, const std::string& id) {
    const PolyRope* r = s.find_rope(id);
    if (!r) throw MoveError("no rope '" + id + "'");
    return *r;
}

// Distance of the unit direction w from the cone spanned by e1, e2 at a vertex.
double cone_escape(const Vec3& w, const Vec3& e1, const Vec3& e2) {
    Vec3 n = normalized(cross(e1, e2));
    double wn = dot(w, n);
    Vec3 wp = w - n * wn;
    double g11 = dot(e1, e1), g12 = dot(e1, e2), g22 = dot(e2, e2);
    double b1 = dot(wp, e1), b2 = dot(wp, e2);
    double det = g11 * g22 - g12 * g12;
    double al = (b1 * g22 - b2 * g12) / det, be = (b2 * g11 - b1 * g12) / det;
    if (al >= 0 && be >= 0) return std::abs(wn);
    auto ray = [&](const Vec3& e) {
        Vec3 u = normalized(e);
        return norm(w - u * std::max(0.0, dot(w, u)));
    };
    return std::min(ray(e1), ray(e2));
}

// The solid triangle (verts[i], verts[i+1], apex) swept against everything the
// rope must avoid. `verts` is the rope polygon that owns the edge (i, i+1).
MoveCheck triangle_rule(const Scene& s, const PolyRope& r, const std::vector<Vec3>& verts, size_t i,
                        const Vec3& apex) {
    MoveCheck out;
    auto fail = [&](const std::string& obstacle, double d, const std::string& what) {
        out.ok = false;
        out.violations.push_back({r.id, obstacle, d, what});
    };
    const double delta = s.clearance;
    const ContactPolicy pol;
    const size_t n = verts.size();
    const size_t ne = r.closed ? n : n - 1;
    const Vec3 P = verts[i], Q = verts[(i + 1) % n];
    TriangleT tri{P, Q, apex};

    std::vector<Obstacle> obs;
    for (const RigidPiece& p : s.pieces) {
        if (!pol.rope_vs_piece(s, r, p)) continue;
        for (const PiecePart& part : parts_of(p)) {
            Obstacle o;
            o.name = part.name;
            if (part.segment) {
                o.kind = Obstacle::Kind::Segment;
                o.segment = *part.segment;
            } else {
                o.kind = Obstacle::Kind::Circle;
                o.circle = *part.circle;
            }
            obs.push_back(o);
        }
    }
    if (pol.rope_vs_rope(s)) {
        for (const PolyRope& o : s.ropes) {
            if (o.id == r.id) continue;
            Obstacle ob;
            ob.kind = Obstacle::Kind::Polyline;
            ob.name = o.id;
            ob.polyline = o.vertices;
            ob.closed = o.closed;
            obs.push_back(ob);
        }
    }
    const bool self = pol.rope_self(s);
    size_t prev = ne, next = ne;  // adjacent edges of edge i, ne = none
    if (r.closed) {
        prev = (i + ne - 1) % ne;
        next = (i + 1) % ne;
    } else {
        if (i > 0) prev = i - 1;
        if (i + 1 < ne) next = i + 1;
    }
    if (self) {
        for (size_t k = 0; k < ne; ++k) {
            if (k == i || k == prev || k == next) continue;
            Obstacle ob;
            ob.kind = Obstacle::Kind::Segment;
            ob.name = r.id + " (self)";
            ob.segment = {verts[k], verts[(k + 1) % n]};
            obs.push_back(ob);
        }
    }
    ClearReport rep = triangle_clear(tri, obs, delta);
    if (!rep.ok) fail(rep.obstacle, rep.distance, "triangle too close");

    for (size_t pi = 0; pi < s.forbidden_planes.size(); ++pi) {
        const PlaneT& pl = s.forbidden_planes[pi];
        const double pin_ball = kPinBallFactor * delta;
        bool pin_p = !r.closed && !r.pinned.empty() && i == 0;
        bool pin_q = !r.closed && r.pinned.size() == 2 && i + 1 == ne;
        double h;
        if (pin_p && pin_q)
            h = std::min(plane_height_outside_ball(tri, pl, r.pinned[0], pin_ball),
                         plane_height_outside_ball(tri, pl, r.pinned[1], pin_ball));
        else if (pin_p)
            h = plane_height_outside_ball(tri, pl, r.pinned[0], pin_ball);
        else if (pin_q)
            h = plane_height_outside_ball(tri, pl, r.pinned[1], pin_ball);
        else
            h = plane_height(tri, pl);
        if (h < delta) fail("plane" + std::to_string(pi), h, "triangle too close");
    }

    if (self) {
        // Neighboring edges may only meet the triangle at the shared vertex.
        if (prev != ne && prev != next) {
            Vec3 w = normalized(verts[prev] - P);
            if (cone_escape(w, Q - P, apex - P) <= kEps) fail(r.id + " (self)", 0, "adjacent edge enters the triangle");
        }
        if (next != ne && prev != next) {
            Vec3 w = normalized(verts[(next + 1) % n] - Q);
            if (cone_escape(w, P - Q, apex - Q) <= kEps) fail(r.id + " (self)", 0, "adjacent edge enters the triangle");
        }
        if (prev != ne && prev == next) {
            // Closed triangle rope: the single other vertex is adjacent to both ends.
            const Vec3& V = verts[(i + 2) % n];
            if (cone_escape(normalized(V - P), Q - P, apex - P) <= kEps ||
                cone_escape(normalized(V - Q), P - Q, apex - Q) <= kEps)
                fail(r.id + " (self)", 0, "adjacent edge enters the triangle");
        }
        if (out.ok) {
            // New edges against the neighbors they become non-adjacent to.
            if (prev != ne) {
                double d = distance(SegmentT{apex, Q}, SegmentT{verts[prev], P});
                if (d < delta) fail(r.id + " (self)", d, "new edge too close");
            }
            if (next != ne) {
                double d = distance(SegmentT{P, apex}, SegmentT{Q, verts[(next + 1) % n]});
                if (d < delta) fail(r.id + " (self)", d, "new edge too close");
            }
        }
    }
    return out;
}

}  // namespace

MoveCheck validate_delta(const Scene& s, const DeltaMove& m) {
    const PolyRope& r = rope_or_throw(s, m.rope);
    if (m.edge >= r.edge_count()) throw MoveError("edge index out of range");
    const SegmentT e = r.edge(m.edge);
    check_triangle({e.a, e.b, m.apex});
    MoveCheck out = triangle_rule(s, r, r.vertices, m.edge, m.apex);
    if (r.length_budget) {
        double p = r.perimeter() - norm(e.b - e.a) + norm(m.apex - e.a) + norm(e.b - m.apex);
        if (p > *r.length_budget) {
            out.ok = false;
            out.violations.push_back({r.id, "budget", p, "perimeter would exceed the length budget"});
        }
    }
    return out;
}

MoveCheck validate_inverse(const Scene& s, const InverseDelta& m) {
    const PolyRope& r = rope_or_throw(s, m.rope);
    const size_t n = r.vertices.size();
    if (m.vertex >= n) throw MoveError("vertex index out of range");
    MoveCheck out;
    if (!r.closed && (m.vertex == 0 || m.vertex + 1 == n)) {
        out.ok = false;
        out.violations.push_back({r.id, "", 0, "rope endpoints cannot be removed"});
        return out;
    }
    if (r.closed && n <= 3) {
        out.ok = false;
        out.violations.push_back({r.id, "", 0, "closed rope needs at least three vertices"});
        return out;
    }
    std::vector<Vec3> base = r.vertices;
    base.erase(base.begin() + static_cast<long>(m.vertex));
    size_t i = (m.vertex + n - 1) % n;  // index of P in `base` (same as in the rope when vertex > 0)
    if (m.vertex == 0) i = base.size() - 1;
    const Vec3& P = base[i];
    const Vec3& Q = base[(i + 1) % base.size()];
    const Vec3& A = r.vertices[m.vertex];
    if (norm(cross(Q - P, A - P)) <= kEps * std::max(1.0, norm(Q - P))) {
        out.ok = false;
        out.violations.push_back({r.id, "", 0, "degenerate triangle"});
        return out;
    }
    return triangle_rule(s, r, base, i, A);
}

double step_displacement(const RigidPiece& p, const RigidStep& m) {
    return norm(m.translation) + std::abs(m.angle) * p.circumradius();
}

RigidPiece posed(const RigidPiece& p, const RigidStep& m) {
    RigidPiece q = p;
    const Vec3 ref = p.reference();
    const Vec3 axis = m.angle != 0 ? normalized(m.axis) : Vec3{0, 0, 1};
    auto move_point = [&](const Vec3& x) {
        if (m.angle == 0) return x + m.translation;
        return ref + rotate(x - ref, axis, m.angle) + m.translation;
    };
    if (q.segment) q.segment = SegmentT{move_point(q.segment->a), move_point(q.segment->b)};
    if (q.circle) {
        q.circle->center = move_point(q.circle->center);
        if (m.angle != 0) q.circle->normal = normalized(rotate(q.circle->normal, axis, m.angle));
    }
    for (Attachment& a : q.attachments) a.point = move_point(a.point);
    return q;
}

namespace {

Scene apply_rigid(const Scene& s, const RigidStep& m) {
    Scene out = s;
    RigidPiece* p = out.find_piece(m.piece);
    *p = posed(*p, m);
    for (const Attachment& a : p->attachments) {
        PolyRope* r = out.find_rope(a.rope);
        if (!r) continue;
        (a.end == "start" ? r->vertices.front() : r->vertices.back()) = a.point;
    }
    return out;
}

}  // namespace

MoveCheck validate_rigid_step(const Scene& s, const RigidStep& m) {
    const RigidPiece* p = s.find_piece(m.piece);
    if (!p) throw MoveError("no piece '" + m.piece + "'");
    if (!p->movable) throw MoveError("piece '" + m.piece + "' is not movable");
    if (m.angle != 0 && norm(m.axis) <= kEps) throw MoveError("rotation axis is zero");
    double disp = step_displacement(*p, m);
    if (disp > 0.5 * s.clearance * (1 + 1e-12)) throw MoveError("step too large: displacement " + std::to_string(disp));

    Scene next = apply_rigid(s, m);
    const RigidPiece& q = *next.find_piece(m.piece);
    MoveCheck out;
    std::string name;
    double d = piece_clearance(next, q, &name);
    if (d < s.clearance) {
        out.ok = false;
        out.violations.push_back({q.id, name, d, "end pose too close"});
    }
    const ContactPolicy pol;
    for (const PolyRope& r : next.ropes) {
        bool avoids = pol.rope_vs_piece(next, r, q);
        bool welded_start = false, welded_end = false;
        for (const Attachment& a : q.attachments) {
            if (a.rope != r.id) continue;
            (a.end == "start" ? welded_start : welded_end) = true;
        }
        if (!avoids && !welded_start && !welded_end) continue;
        for (size_t e = 0; e < r.edge_count(); ++e) {
            bool touches_weld = (welded_start && e == 0) || (welded_end && e + 1 == r.edge_count());
            if (!avoids && !touches_weld) continue;
            double c;
            if (touches_weld) {
                c = rope_segment_clearance(next, r, e, &name);
            } else {
                c = std::numeric_limits<double>::infinity();
                for (const PiecePart& part : parts_of(q)) {
                    double dd = part.segment ? distance(r.edge(e), *part.segment)
                                             : distance(r.edge(e), *part.circle) - part.circle->tube_radius;
                    if (dd < c) {
                        c = dd;
                        name = part.name;
                    }
                }
            }
            if (c < s.clearance) {
                out.ok = false;
                out.violations.push_back({r.id + " edge " + std::to_string(e), name, c, "too close after step"});
            }
        }
    }
    return out;
}

MoveCheck validate_move(const Scene& s, const Move& m) {
    return std::visit(
        [&](const auto& mv) -> MoveCheck {
            using T = std::decay_t<decltype(mv)>;
            if constexpr (std::is_same_v<T, DeltaMove>) return validate_delta(s, mv);
            else if constexpr (std::is_same_v<T, InverseDelta>) return validate_inverse(s, mv);
            else return validate_rigid_step(s, mv);
        },
        m);
}

Scene apply_unchecked(const Scene& s, const Move& m) {
    if (const auto* d = std::get_if<DeltaMove>(&m)) {
        Scene out = s;
        PolyRope* r = out.find_rope(d->rope);
        if (!r) throw MoveError("no rope '" + d->rope + "'");
        if (d->edge >= r->edge_count()) throw MoveError("edge index out of range");
        r->vertices.insert(r->vertices.begin() + static_cast<long>(d->edge) + 1, d->apex);
        return out;
    }
    if (const auto* v = std::get_if<InverseDelta>(&m)) {
        Scene out = s;
        PolyRope* r = out.find_rope(v->rope);
        if (!r) throw MoveError("no rope '" + v->rope + "'");
        if (v->vertex >= r->vertices.size()) throw MoveError("vertex index out of range");
        r->vertices.erase(r->vertices.begin() + static_cast<long>(v->vertex));
        return out;
    }
    const auto& g = std::get<RigidStep>(m);
    if (!s.find_piece(g.piece)) throw MoveError("no piece '" + g.piece + "'");
    return apply_rigid(s, g);
}

Scene apply_move(const Scene& s, const Move& m) {
    MoveCheck c = validate_move(s, m);
    if (!c.ok) throw IllegalMove(c.message());
    return apply_unchecked(s, m);
}

std::vector<RigidStep> rigid_step_set(const Scene& s, const RigidPiece& p) {
    std::vector<RigidStep> out;
    const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (double len : {0.5 * s.clearance, 0.25 * s.clearance})
        for (const Vec3& a : axes)
            for (double sg : {1.0, -1.0}) out.push_back({p.id, {0, 0, 1}, 0, a * (sg * len)});
    double angle = 0.5 * s.clearance / p.circumradius();
    for (const Vec3& a : axes)
        for (double sg : {1.0, -1.0}) out.push_back({p.id, a, sg * angle, {0, 0, 0}});
    return out;
}

std::vector<Vec3> apex_offsets(const Discretization& d) {
    if (!(d.pitch > 0) || !(d.ball > 0)) throw MoveError("discretization needs positive pitch and ball");
    const int k = static_cast<int>(std::floor(d.ball / d.pitch + 1e-9));
    std::vector<Vec3> offsets;
    for (int i = -k; i <= k; ++i)
        for (int j = -k; j <= k; ++j)
            for (int l = -k; l <= k; ++l) {
                if (i == 0 && j == 0 && l == 0) continue;
                Vec3 o{i * d.pitch, j * d.pitch, l * d.pitch};
                if (norm(o) <= d.ball + 1e-12) offsets.push_back(o);
            }
    // Loop order is already lexicographic in (x, y, z).
    return offsets;
}

bool apex_usable(const SegmentT& seg, const Vec3& apex) { return norm(cross(seg.b - seg.a, apex - seg.a)) > kEps; }

std::vector<Move> candidate_moves(const Scene& s, const Discretization& d) {
    const std::vector<Vec3> offsets = apex_offsets(d);
    std::vector<Move> out;
    std::vector<const PolyRope*> ropes;
    for (const PolyRope& r : s.ropes) ropes.push_back(&r);
    std::sort(ropes.begin(), ropes.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const PolyRope* r : ropes) {
        for (size_t e = 0; e < r->edge_count(); ++e) {
            SegmentT seg = r->edge(e);
            Vec3 mid = (seg.a + seg.b) * 0.5;
            for (const Vec3& o : offsets)
                if (apex_usable(seg, mid + o)) out.push_back(DeltaMove{r->id, e, mid + o});
        }
        for (size_t v = 0; v < r->vertices.size(); ++v) {
            if (!r->closed && (v == 0 || v + 1 == r->vertices.size())) continue;
            out.push_back(InverseDelta{r->id, v});
        }
    }
    if (d.rigid) {
        std::vector<const RigidPiece*> pieces;
        for (const RigidPiece& p : s.pieces)
            if (p.movable) pieces.push_back(&p);
        std::sort(pieces.begin(), pieces.end(), [](auto* a, auto* b) { return a->id < b->id; });
        for (const RigidPiece* p : pieces)
            for (const RigidStep& st : rigid_step_set(s, *p)) out.push_back(st);
    }
    return out;
}

std::vector<Move> enumerate_moves(const Scene& s, const Discretization& d) {
    std::vector<Move> out;
    for (const Move& m : candidate_moves(s, d))
        if (validate_move(s, m).ok) out.push_back(m);
    return out;
}

// ---------------------------------------------------------------- JSON

json move_json(const Move& m) {
    if (const auto* d = std::get_if<DeltaMove>(&m))
        return {{"type", "delta"}, {"rope", d->rope}, {"edge", d->edge}, {"apex", vec_json(d->apex)}};
    if (const auto* v = std::get_if<InverseDelta>(&m))
        return {{"type", "inverse_delta"}, {"rope", v->rope}, {"vertex", v->vertex}};
    const auto& g = std::get<RigidStep>(m);
    return {{"type", "rigid"},
            {"piece", g.piece},
            {"rotation", {{"axis", vec_json(g.axis)}, {"angle", g.angle}}},
            {"translation", vec_json(g.translation)}};
}

Move json_move(const json& j) {
    try {
        std::string type = j.at("type").get<std::string>();
        if (type == "delta") return DeltaMove{j.at("rope").get<std::string>(), j.at("edge").get<size_t>(), json_vec(j.at("apex"))};
        if (type == "inverse_delta") return InverseDelta{j.at("rope").get<std::string>(), j.at("vertex").get<size_t>()};
        if (type == "rigid") {
            const json& rot = j.at("rotation");
            return RigidStep{j.at("piece").get<std::string>(), json_vec(rot.at("axis")), rot.at("angle").get<double>(),
                             json_vec(j.at("translation"))};
        }
        throw ParseError("unknown move type '" + type + "'");
    } catch (const json::exception& e) {
        throw ParseError(std::string("move: ") + e.what());
    }
}

json to_json(const MoveScript& s) {
    json moves = json::array();
    for (const Move& m : s.moves) moves.push_back(move_json(m));
    return {{"version", s.version}, {"scene_hash", s.scene_hash}, {"moves", moves}};
}

MoveScript script_from_json(const json& j) {
    try {
        MoveScript s;
        s.version = j.at("version").get<int>();
        if (s.version != 1) throw ParseError("unsupported script version");
        s.scene_hash = j.at("scene_hash").get<std::string>();
        for (const json& m : j.at("moves")) s.moves.push_back(json_move(m));
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("script: ") + e.what());
    }
}

MoveScript load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ParseError(std::string("script: ") + e.what());
    }
    return script_from_json(j);
}

void save_script(const MoveScript& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << to_json(s).dump() << "\n";
}

}  // namespace untangle
