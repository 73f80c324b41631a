#include "untangle/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "untangle/convex.hpp"

namespace untangle {

using nlohmann::json;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------- words

WordF2 WordF2::parse(const std::string& s) {
    WordF2 w;
    for (char c : s) {
        switch (c) {
            case 'a': w.push(1); break;
            case 'A': w.push(-1); break;
            case 'b': w.push(2); break;
            case 'B': w.push(-2); break;
            default: throw std::invalid_argument(std::string("bad letter '") + c + "' in word");
        }
    }
    return w;
}

void WordF2::push(int letter) {
    if (!letters_.empty() && letters_.back() == -letter)
        letters_.pop_back();
    else
        letters_.push_back(letter);
}

std::string WordF2::str() const {
    std::string s;
    for (int l : letters_) s += l == 1 ? 'a' : l == -1 ? 'A' : l == 2 ? 'b' : 'B';
    return s;
}

int WordF2::exponent_sum(int generator) const {
    int s = 0;
    for (int l : letters_)
        if (std::abs(l) == generator) s += l > 0 ? 1 : -1;
    return s;
}

bool WordF2::is_reduced() const {
    for (size_t i = 1; i < letters_.size(); ++i)
        if (letters_[i] == -letters_[i - 1]) return false;
    return true;
}

namespace {

CircleT flat(const CircleT& c) {
    CircleT f = c;
    f.tube_radius = 0;
    return f;
}

struct Hit {
    size_t seg;
    double t;
    int letter;
};

void collect_hits(const PolyRope& rope, const DiskT& d, int generator, std::vector<Hit>& out) {
    for (size_t i = 0; i < rope.edge_count(); ++i) {
        SegmentT s = rope.edge(i);
        Crossing c = seg_disk_crossing(s, d);
        if (c == Crossing::Degenerate)
            throw DegenerateCrossing(rope.id + " edge " + std::to_string(i) + " meets a disk degenerately");
        if (c == Crossing::None) continue;
        out.push_back({i, seg_disk_parameter(s, d), crossing_sign(c) * generator});
    }
}

}  // namespace

WordF2 f2_word(const PolyRope& rope, const DiskT& a, const DiskT& b, const std::vector<SegmentT>& avoid, double delta) {
    const Support sa = support_disk(flat(a.circle)), sb = support_disk(flat(b.circle));
    if (convex_distance(sa, sb) < delta) throw InvariantUndefined("spanning disks are not mutually clear");
    for (const SegmentT& s : avoid)
        if (convex_distance(sa, support_points({s.a, s.b})) < delta)
            throw InvariantUndefined("spanning disk is not clear of the pole");
    std::vector<Hit> hits;
    collect_hits(rope, a, 1, hits);
    collect_hits(rope, b, 2, hits);
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Hit& x, const Hit& y) { return x.seg != y.seg ? x.seg < y.seg : x.t < y.t; });
    WordF2 w;
    for (const Hit& h : hits) w.push(h.letter);
    return w;
}

int crossing_index(const PolyRope& rope, const DiskT& d) {
    std::vector<Hit> hits;
    collect_hits(rope, d, 1, hits);
    int sum = 0;
    for (const Hit& h : hits) sum += h.letter;
    return sum;
}

WordF2 model_a_word(const Scene& s) {
    const RigidPiece* hoop = s.find_piece("hoop");
    const RigidPiece* lolly = s.find_piece("lollipop");
    const PolyRope* rope = s.find_rope("rope");
    if (!hoop || !lolly || !rope) throw InvariantUndefined("not a Model A scene");
    return f2_word(*rope, DiskT{*hoop->circle}, DiskT{*lolly->circle}, {*lolly->segment}, s.clearance);
}

int model_b_index(const Scene& s) {
    const RigidPiece* hoop = s.find_piece("hoop");
    const PolyRope* rope = s.find_rope("rope");
    if (!hoop || !rope || !hoop->circle) throw InvariantUndefined("not a Model B scene");
    return crossing_index(*rope, DiskT{*hoop->circle});
}

// ---------------------------------------------------------------- diagrams

int Diagram::component_index(const std::string& id) const {
    for (size_t i = 0; i < components.size(); ++i)
        if (components[i] == id) return static_cast<int>(i);
    throw DiagramError("unknown component '" + id + "'");
}

void Diagram::validate() const {
    const int na = static_cast<int>(arcs.size()), nc = static_cast<int>(crossings.size());
    std::vector<int> arcs_per(components.size(), 0);
    for (const Arc& a : arcs) {
        if (a.component < 0 || a.component >= static_cast<int>(components.size()))
            throw DiagramError("arc references a missing component");
        if ((a.from < 0) != (a.to < 0)) throw DiagramError("arc has one open end");
        if (a.from >= nc || a.to >= nc) throw DiagramError("arc references a missing crossing");
        ++arcs_per[a.component];
    }
    for (size_t c = 0; c < components.size(); ++c)
        if (arcs_per[c] == 0) throw DiagramError("component without arcs");
    for (const Arc& a : arcs)
        if (a.from < 0 && arcs_per[a.component] != 1) throw DiagramError("closed arc in a component with crossings");
    for (int c = 0; c < nc; ++c) {
        const DiagramCrossing& x = crossings[c];
        for (int id : {x.over, x.under_in, x.under_out})
            if (id < 0 || id >= na) throw DiagramError("crossing references a missing arc");
        if (x.sign != 1 && x.sign != -1) throw DiagramError("crossing sign must be +-1");
        if (arcs[x.under_in].to != c || arcs[x.under_out].from != c)
            throw DiagramError("under arcs do not meet at their crossing");
        if (arcs[x.under_in].component != arcs[x.under_out].component)
            throw DiagramError("under arcs belong to different components");
    }
}

std::pair<Vec3, Vec3> projection_frame(const Vec3& dir) {
    Vec3 d = normalized(dir);
    Vec3 e1 = normalized(cross(d, std::abs(d.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
    return {e1, cross(d, e1)};
}

PlanarCurve project_curve(const std::vector<Vec3>& pts, const Vec3& dir) {
    Vec3 d = normalized(dir);
    auto [e1, e2] = projection_frame(d);
    PlanarCurve c;
    for (const Vec3& p : pts) {
        c.pts.push_back({dot(p, e1), dot(p, e2)});
        c.depth.push_back(dot(p, d));
    }
    return c;
}

namespace {

double point_seg_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 r = b - a;
    double t = std::clamp(dot(p - a, r) / dot(r, r), 0.0, 1.0);
    return norm(p - (a + r * t));
}

struct Seg2 {
    int comp;
    size_t k;
    Vec2 a, b;
    double da, db;
};

}  // namespace

Diagram diagram_from_planar(const std::vector<std::string>& ids, const std::vector<PlanarCurve>& curves, double tol) {
    std::vector<Seg2> segs;
    for (size_t c = 0; c < curves.size(); ++c) {
        const PlanarCurve& pc = curves[c];
        const size_t n = pc.pts.size();
        if (n < 3) throw DiagramError("curve '" + ids[c] + "' needs at least three vertices");
        for (size_t k = 0; k < n; ++k) {
            Seg2 s{static_cast<int>(c), k, pc.pts[k], pc.pts[(k + 1) % n], pc.depth[k], pc.depth[(k + 1) % n]};
            if (norm(s.b - s.a) <= tol) throw GenericityError("an edge projects to a point");
            segs.push_back(s);
        }
    }
    auto adjacent = [&](const Seg2& s, const Seg2& t) {
        if (s.comp != t.comp) return false;
        size_t n = curves[s.comp].pts.size();
        return (s.k + 1) % n == t.k || (t.k + 1) % n == s.k;
    };

    // Vertex-over-edge: no vertex may sit on a segment it does not bound.
    for (const Seg2& s : segs) {
        for (size_t c = 0; c < curves.size(); ++c) {
            const auto& pts = curves[c].pts;
            for (size_t k = 0; k < pts.size(); ++k) {
                if (static_cast<int>(c) == s.comp && (k == s.k || k == (s.k + 1) % pts.size())) continue;
                if (point_seg_dist(pts[k], s.a, s.b) <= tol) throw GenericityError("a vertex projects onto an edge");
            }
        }
    }

    std::vector<CrossingPlace> places;
    std::vector<int> signs;
    for (size_t i = 0; i < segs.size(); ++i) {
        for (size_t j = i + 1; j < segs.size(); ++j) {
            const Seg2& s = segs[i];
            const Seg2& t = segs[j];
            Vec2 r = s.b - s.a, q = t.b - t.a;
            double den = cross(r, q);
            double lr = norm(r), lq = norm(q);
            if (adjacent(s, t)) {
                // Folding back onto the neighbor is a tangency in the projection.
                if (std::abs(den) <= 1e-12 * lr * lq && dot(r, q) < 0) throw GenericityError("edges fold onto each other");
                continue;
            }
            if (std::max(s.a.x, s.b.x) < std::min(t.a.x, t.b.x) - tol || std::max(t.a.x, t.b.x) < std::min(s.a.x, s.b.x) - tol ||
                std::max(s.a.y, s.b.y) < std::min(t.a.y, t.b.y) - tol || std::max(t.a.y, t.b.y) < std::min(s.a.y, s.b.y) - tol)
                continue;
            if (std::abs(den) <= 1e-12 * lr * lq) continue;  // parallel; overlaps caught by the vertex test
            Vec2 w = t.a - s.a;
            double u = cross(w, q) / den, v = cross(w, r) / den;
            if (u <= 0 || u >= 1 || v <= 0 || v >= 1) continue;
            if (std::abs(den) < 1e-6 * lr * lq) throw GenericityError("near-tangent crossing");
            double ds = s.da + u * (s.db - s.da), dt = t.da + v * (t.db - t.da);
            if (std::abs(ds - dt) <= tol) throw DiagramError("curves meet in space");
            const bool s_over = ds > dt;
            const Seg2& o = s_over ? s : t;
            const Seg2& un = s_over ? t : s;
            double uo = s_over ? u : v, uu = s_over ? v : u;
            Vec2 od = o.b - o.a, ud = un.b - un.a;
            signs.push_back(cross(od, ud) > 0 ? 1 : -1);
            places.push_back({o.comp, un.comp, static_cast<double>(o.k) + uo, static_cast<double>(un.k) + uu, s.a + r * u});
        }
    }
    for (size_t i = 0; i < places.size(); ++i)
        for (size_t j = i + 1; j < places.size(); ++j)
            if (norm(places[i].at - places[j].at) <= tol) throw GenericityError("triple point");

    Diagram d;
    d.components = ids;
    d.curves = curves;
    d.places = places;
    d.crossings.resize(places.size());
    const int nx = static_cast<int>(places.size());
    std::vector<std::vector<int>> unders(curves.size());
    for (int x = 0; x < nx; ++x) unders[places[x].under_comp].push_back(x);
    std::vector<int> first_arc(curves.size());
    for (size_t c = 0; c < curves.size(); ++c) {
        auto& u = unders[c];
        std::sort(u.begin(), u.end(), [&](int a, int b) { return places[a].under_pos < places[b].under_pos; });
        first_arc[c] = static_cast<int>(d.arcs.size());
        if (u.empty()) {
            d.arcs.push_back({static_cast<int>(c), -1, -1});
            continue;
        }
        const int m = static_cast<int>(u.size());
        for (int k = 0; k < m; ++k) {
            int arc = first_arc[c] + k;
            d.arcs.push_back({static_cast<int>(c), u[k], u[(k + 1) % m]});
            d.crossings[u[k]].under_out = arc;
            d.crossings[u[(k + 1) % m]].under_in = arc;
        }
    }
    for (int x = 0; x < nx; ++x) {
        const auto& u = unders[places[x].over_comp];
        int c = places[x].over_comp;
        int arc;
        if (u.empty()) {
            arc = first_arc[c];
        } else {
            // Last under-passage before the over position, wrapping around.
            int k = -1;
            for (int q = 0; q < static_cast<int>(u.size()); ++q)
                if (places[u[q]].under_pos < places[x].over_pos) k = q;
            arc = first_arc[c] + (k >= 0 ? k : static_cast<int>(u.size()) - 1);
        }
        d.crossings[x].over = arc;
        d.crossings[x].sign = signs[x];
    }
    d.validate();
    return d;
}

namespace {

double unit_double(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0); }

}  // namespace

Vec3 random_direction(std::mt19937_64& g) {
    for (;;) {
        Vec3 v{2 * unit_double(g) - 1, 2 * unit_double(g) - 1, 2 * unit_double(g) - 1};
        double n = norm(v);
        if (n > 1e-3 && n <= 1) return v / n;
    }
}

namespace {

void check_separation(const std::vector<Curve3>& curves, double min_sep) {
    struct S {
        size_t c, k;
        SegmentT s;
    };
    std::vector<S> segs;
    for (size_t c = 0; c < curves.size(); ++c) {
        const auto& p = curves[c].pts;
        for (size_t k = 0; k < p.size(); ++k) segs.push_back({c, k, {p[k], p[(k + 1) % p.size()]}});
    }
    for (size_t i = 0; i < segs.size(); ++i) {
        for (size_t j = i + 1; j < segs.size(); ++j) {
            const S& a = segs[i];
            const S& b = segs[j];
            if (a.c == b.c) {
                size_t n = curves[a.c].pts.size();
                if ((a.k + 1) % n == b.k || (b.k + 1) % n == a.k) continue;
            }
            // Bounding-sphere rejection before the exact test.
            Vec3 ma = (a.s.a + a.s.b) * 0.5, mb = (b.s.a + b.s.b) * 0.5;
            double ra = 0.5 * norm(a.s.b - a.s.a), rb = 0.5 * norm(b.s.b - b.s.a);
            if (norm(ma - mb) - ra - rb >= min_sep) continue;
            double d = distance(a.s, b.s);
            if (d < min_sep)
                throw DiagramError("curves too close: " + curves[a.c].id + " and " + curves[b.c].id + " at distance " +
                                   std::to_string(d));
        }
    }
}

}  // namespace

Diagram project_diagram(const std::vector<Curve3>& curves, const ProjectOptions& opt) {
    check_separation(curves, opt.min_separation);
    std::vector<std::string> ids;
    for (const Curve3& c : curves) ids.push_back(c.id);
    auto attempt = [&](const Vec3& dir) {
        std::vector<PlanarCurve> pcs;
        for (const Curve3& c : curves) pcs.push_back(project_curve(c.pts, dir));
        Diagram d = diagram_from_planar(ids, pcs, opt.tolerance);
        d.direction = normalized(dir);
        return d;
    };
    if (!opt.auto_direction) {
        if (norm(opt.direction) <= kEps) throw GenericityError("projection direction is zero");
        return attempt(opt.direction);
    }
    std::mt19937_64 g(opt.seed);
    std::string last;
    for (int i = 0; i < opt.retries; ++i) {
        try {
            return attempt(random_direction(g));
        } catch (const GenericityError& e) {
            last = e.what();
        }
    }
    throw GenericityError("no generic direction after " + std::to_string(opt.retries) + " tries: " + last);
}

int linking_number(const Diagram& d, int ci, int cj) {
    const int nc = static_cast<int>(d.components.size());
    if (ci < 0 || cj < 0 || ci >= nc || cj >= nc) throw DiagramError("unknown component");
    if (ci == cj) throw DiagramError("linking number needs two different components");
    int sum = 0;
    for (const DiagramCrossing& x : d.crossings) {
        int a = d.arcs[x.over].component, b = d.arcs[x.under_in].component;
        if ((a == ci && b == cj) || (a == cj && b == ci)) sum += x.sign;
    }
    if (sum % 2 != 0) throw DiagramError("odd inter-component crossing sum");
    return sum / 2;
}

int linking_number(const Diagram& d, const std::string& a, const std::string& b) {
    return linking_number(d, d.component_index(a), d.component_index(b));
}

int tricolor_nullity(const Diagram& d) {
    d.validate();
    const size_t na = d.arcs.size();
    std::vector<std::vector<int>> m;
    for (const DiagramCrossing& x : d.crossings) {
        std::vector<int> row(na, 0);
        row[x.over] += 1;
        row[x.under_in] += 1;
        row[x.under_out] += 1;
        for (int& v : row) v %= 3;
        m.push_back(std::move(row));
    }
    size_t rank = 0;
    for (size_t col = 0; col < na && rank < m.size(); ++col) {
        size_t piv = rank;
        while (piv < m.size() && m[piv][col] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[rank], m[piv]);
        if (m[rank][col] == 2)
            for (int& v : m[rank]) v = (v * 2) % 3;
        for (size_t r = 0; r < m.size(); ++r) {
            if (r == rank || m[r][col] == 0) continue;
            int f = m[r][col];
            for (size_t c = 0; c < na; ++c) m[r][c] = ((m[r][c] - f * m[rank][c]) % 3 + 3) % 3;
        }
        ++rank;
    }
    return static_cast<int>(na - rank);
}

uint64_t tricolor_count(const Diagram& d) {
    int k = tricolor_nullity(d);
    if (k > 40) throw DiagramError("coloring count overflows");
    uint64_t c = 1;
    for (int i = 0; i < k; ++i) c *= 3;
    return c;
}

// ---------------------------------------------------------------- band sum

namespace {

bool proper_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    Vec2 r = b - a, q = d - c;
    double den = cross(r, q);
    if (std::abs(den) <= 1e-15) return false;
    double u = cross(c - a, q) / den, v = cross(c - a, r) / den;
    return u > 0 && u < 1 && v > 0 && v < 1;
}

struct Cut {
    Vec2 p;
    double depth;
};

Cut at(const PlanarCurve& c, size_t k, double t) {
    size_t n = c.pts.size();
    const Vec2& a = c.pts[k];
    const Vec2& b = c.pts[(k + 1) % n];
    return {a + (b - a) * t, c.depth[k] + t * (c.depth[(k + 1) % n] - c.depth[k])};
}

int arc_at(const Diagram& d, int comp, double pos) {
    int best = -1, last = -1;
    double best_pos = -1, last_pos = -1;
    for (size_t a = 0; a < d.arcs.size(); ++a) {
        const Arc& arc = d.arcs[a];
        if (arc.component != comp) continue;
        if (arc.from < 0) return static_cast<int>(a);
        double p = d.places[arc.from].under_pos;
        if (p < pos && p > best_pos) {
            best = static_cast<int>(a);
            best_pos = p;
        }
        if (p > last_pos) {
            last = static_cast<int>(a);
            last_pos = p;
        }
    }
    return best >= 0 ? best : last;
}

}  // namespace

Diagram band_sum(const Diagram& d, int ci, int cj, const BandSite& site) {
    const int nc = static_cast<int>(d.components.size());
    if (ci < 0 || cj < 0 || ci >= nc || cj >= nc || ci == cj) throw DiagramError("band sum needs two distinct components");
    if (d.curves.size() != d.components.size()) throw DiagramError("band sum needs diagram geometry");
    if (site.arc_i < 0 || site.arc_j < 0 || site.arc_i >= static_cast<int>(d.arcs.size()) ||
        site.arc_j >= static_cast<int>(d.arcs.size()) || d.arcs[site.arc_i].component != ci ||
        d.arcs[site.arc_j].component != cj)
        throw DiagramError("illegal site: arcs do not belong to the components");
    if (std::abs(site.half_twists) > 1) throw DiagramError("illegal site: at most one half twist");

    const PlanarCurve& A = d.curves[ci];
    const PlanarCurve& B = d.curves[cj];
    auto free_segments = [&](int comp, int arc) {
        const PlanarCurve& c = d.curves[comp];
        std::vector<size_t> out;
        for (size_t k = 0; k < c.pts.size(); ++k) {
            bool busy = false;
            for (const CrossingPlace& p : d.places) {
                if ((p.over_comp == comp && std::floor(p.over_pos) == static_cast<double>(k)) ||
                    (p.under_comp == comp && std::floor(p.under_pos) == static_cast<double>(k)))
                    busy = true;
            }
            if (!busy && arc_at(d, comp, k + 0.5) == arc) out.push_back(k);
        }
        return out;
    };
    std::vector<size_t> ka = free_segments(ci, site.arc_i), kb = free_segments(cj, site.arc_j);
    struct Pair {
        double dist;
        size_t k, l;
    };
    std::vector<Pair> pairs;
    for (size_t k : ka)
        for (size_t l : kb) pairs.push_back({norm(at(A, k, 0.5).p - at(B, l, 0.5).p), k, l});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        return std::tie(x.dist, x.k, x.l) < std::tie(y.dist, y.k, y.l);
    });

    auto band_edge_clear = [&](const Vec2& p, const Vec2& q, size_t k, size_t l) {
        for (int c = 0; c < nc; ++c) {
            const PlanarCurve& pc = d.curves[c];
            size_t n = pc.pts.size();
            for (size_t s = 0; s < n; ++s) {
                if ((c == ci && s == k) || (c == cj && s == l)) continue;
                if (proper_cross(p, q, pc.pts[s], pc.pts[(s + 1) % n])) return false;
                if (point_seg_dist(pc.pts[s], p, q) <= 1e-9) return false;
            }
        }
        return true;
    };

    for (const Pair& pr : pairs) {
        const size_t k = pr.k, l = pr.l;
        Cut a1 = at(A, k, 1.0 / 3), a2 = at(A, k, 2.0 / 3), b1 = at(B, l, 1.0 / 3), b2 = at(B, l, 2.0 / 3);
        for (int reversed = 0; reversed < 2; ++reversed) {
            // Band edges: a1 -> e1 and e2 -> a2, entering B at e1 and leaving at e2.
            Cut e1 = reversed ? b1 : b2, e2 = reversed ? b2 : b1;
            bool twisted = proper_cross(a1.p, e1.p, e2.p, a2.p);
            if (twisted != (site.half_twists != 0)) continue;
            if (!band_edge_clear(a1.p, e1.p, k, l) || !band_edge_clear(e2.p, a2.p, k, l)) continue;

            PlanarCurve out;
            auto push = [&](const Vec2& p, double dep) {
                out.pts.push_back(p);
                out.depth.push_back(dep);
            };
            const size_t n = A.pts.size(), m = B.pts.size();
            push(a2.p, a2.depth);
            for (size_t s = 1; s <= n; ++s) push(A.pts[(k + s) % n], A.depth[(k + s) % n]);
            push(a1.p, a1.depth);
            double lift = 0;
            if (twisted) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (const PlanarCurve& pc : d.curves)
                    for (double v : pc.depth) lo = std::min(lo, v), hi = std::max(hi, v);
                lift = 10 * (hi - lo + 1);
            }
            const size_t mark1 = out.pts.size();
            if (twisted) {
                push(a1.p + (e1.p - a1.p) * 0.25, a1.depth + lift);
                push(a1.p + (e1.p - a1.p) * 0.75, e1.depth + lift);
            }
            push(e1.p, e1.depth);
            if (!reversed)
                for (size_t s = 1; s <= m; ++s) push(B.pts[(l + s) % m], B.depth[(l + s) % m]);
            else
                for (size_t s = 0; s < m; ++s) push(B.pts[(l + m - s) % m], B.depth[(l + m - s) % m]);
            push(e2.p, e2.depth);
            const size_t mark2 = out.pts.size();
            if (twisted) {
                push(e2.p + (a2.p - e2.p) * 0.25, e2.depth - lift);
                push(e2.p + (a2.p - e2.p) * 0.75, a2.depth - lift);
            }

            std::vector<std::string> ids;
            std::vector<PlanarCurve> curves;
            for (int c = 0; c < nc; ++c) {
                if (c == cj) continue;
                if (c == ci) {
                    ids.push_back(d.components[ci] + "+" + d.components[cj]);
                    curves.push_back(out);
                } else {
                    ids.push_back(d.components[c]);
                    curves.push_back(d.curves[c]);
                }
            }
            Diagram res = diagram_from_planar(ids, curves);
            if (twisted) {
                // Pick which band edge passes over so the twist has the requested sign.
                int band_sign = 0;
                const int target = ci < cj ? ci : ci - 1;
                auto in_band = [&](double pos) {
                    return (pos >= mark1 - 1.0 && pos < mark1 + 2.0) || (pos >= mark2 - 1.0 && pos < mark2 + 2.0);
                };
                for (size_t x = 0; x < res.places.size(); ++x) {
                    const CrossingPlace& p = res.places[x];
                    if (p.over_comp == target && p.under_comp == target && in_band(p.over_pos) && in_band(p.under_pos))
                        band_sign = res.crossings[x].sign;
                }
                if (band_sign != site.half_twists) {
                    for (size_t q = mark1; q < mark1 + 2; ++q) out.depth[q] -= 2 * lift;
                    for (size_t q = mark2; q < mark2 + 2; ++q) out.depth[q] += 2 * lift;
                    for (size_t c = 0; c < ids.size(); ++c)
                        if (ids[c] == d.components[ci] + "+" + d.components[cj]) curves[c] = out;
                    res = diagram_from_planar(ids, curves);
                }
            }
            res.direction = d.direction;
            return res;
        }
    }
    throw DiagramError("illegal site: no crossing-free place for the band");
}

// ---------------------------------------------------------------- curves from scenes

std::vector<Vec3> circle_polygon(const CircleT& c, double clearance, int min_sides) {
    int n = std::max(3, min_sides);
    const double limit = 0.5 * (c.tube_radius + clearance);
    while (c.radius * (1 - std::cos(kPi / n)) > limit) ++n;
    std::vector<Vec3> pts;
    for (int k = 0; k < n; ++k) pts.push_back(c.point_at(2 * kPi * k / n));
    return pts;
}

std::vector<Curve3> scene_curves(const Scene& s) {
    std::vector<Curve3> out;
    for (const RigidPiece& p : s.pieces)
        if (p.circle && p.kind == PieceKind::Circle) out.push_back({p.id, circle_polygon(*p.circle, s.clearance)});
    for (const PolyRope& r : s.ropes)
        if (r.closed) out.push_back({r.id, r.vertices});
    return out;
}

namespace {

std::vector<Vec3> resample(const std::vector<Vec3>& core, double step) {
    std::vector<Vec3> out{core.front()};
    for (size_t i = 0; i + 1 < core.size(); ++i) {
        const Vec3 &a = core[i], &b = core[i + 1];
        int n = std::max(1, static_cast<int>(std::ceil(norm(b - a) / step)));
        for (int k = 1; k <= n; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / n));
    }
    return out;
}

size_t nearest_edge(const std::vector<Vec3>& P, const Vec3& p) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < P.size(); ++k) {
        double dd = norm((P[k] + P[(k + 1) % P.size()]) * 0.5 - p);
        if (dd < bd) {
            bd = dd;
            best = k;
        }
    }
    return best;
}

}  // namespace

std::vector<Vec3> band_along(const std::vector<Vec3>& P, size_t i, const std::vector<Vec3>& Q, size_t j,
                             const std::vector<Vec3>& core_in, double w, double step) {
    const size_t n = P.size(), m = Q.size();
    std::vector<Vec3> path{(P[i] + P[(i + 1) % n]) * 0.5};
    path.insert(path.end(), core_in.begin(), core_in.end());
    path.push_back((Q[j] + Q[(j + 1) % m]) * 0.5);
    const std::vector<Vec3> core = resample(path, step);
    const size_t L = core.size();
    std::vector<Vec3> tang(L), frame(L);
    for (size_t k = 0; k < L; ++k) tang[k] = normalized(core[std::min(k + 1, L - 1)] - core[k > 0 ? k - 1 : 0]);
    // Parallel transport of the starting normal, then spread the closing twist evenly.
    Vec3 e = P[i] - P[(i + 1) % n];
    frame[0] = normalized(e - tang[0] * dot(e, tang[0]));
    for (size_t k = 1; k < L; ++k) frame[k] = normalized(frame[k - 1] - tang[k] * dot(frame[k - 1], tang[k]));
    Vec3 f = Q[(j + 1) % m] - Q[j];
    Vec3 target = normalized(f - tang[L - 1] * dot(f, tang[L - 1]));
    double ang = std::atan2(dot(cross(frame[L - 1], target), tang[L - 1]), dot(frame[L - 1], target));
    for (size_t k = 0; k < L; ++k) {
        double th = ang * static_cast<double>(k) / static_cast<double>(L - 1);
        frame[k] = frame[k] * std::cos(th) + cross(tang[k], frame[k]) * std::sin(th);
    }
    std::vector<Vec3> out;
    for (size_t k = 0; k < n; ++k) out.push_back(P[(i + 1 + k) % n]);
    for (size_t k = 1; k + 1 < L; ++k) out.push_back(core[k] + frame[k] * w);
    for (size_t k = 0; k < m; ++k) out.push_back(Q[(j + 1 + k) % m]);
    for (size_t k = L - 2; k >= 1; --k) out.push_back(core[k] - frame[k] * w);
    return out;
}

std::vector<Curve3> model_c_band_curves(const Scene& s) {
    const RigidPiece* h1 = s.find_piece("hoop1");
    const RigidPiece* h2 = s.find_piece("hoop2");
    const PolyRope* r1 = s.find_rope("rope1");
    const PolyRope* r2 = s.find_rope("rope2");
    if (!h1 || !h2 || !r1 || !r2) throw InvariantUndefined("not a Model C scene");
    const double R = h1->circle->radius;
    // Canonical site: the band leaves rope1 on the +x side, swings around
    // hoop2 and back over hoop1 before reaching rope2.
    std::vector<Vec3> core{{1.26 * R, 0.88 * R, 0.105 * R}, {-0.71 * R, 1.09 * R, 0.5 * R}};
    size_t i = nearest_edge(r1->vertices, core.front());
    size_t j = nearest_edge(r2->vertices, core.back());
    std::vector<Curve3> out;
    out.push_back({"rope1+rope2", band_along(r1->vertices, i, r2->vertices, j, core)});
    out.push_back({"hoop1", circle_polygon(*h1->circle, s.clearance)});
    out.push_back({"hoop2", circle_polygon(*h2->circle, s.clearance)});
    return out;
}

// ---------------------------------------------------------------- JSON

json to_json(const Diagram& d) {
    json arcs = json::array(), xs = json::array();
    for (const Arc& a : d.arcs)
        arcs.push_back({{"component", a.component}, {"from", a.from < 0 ? json(nullptr) : json(a.from)},
                        {"to", a.to < 0 ? json(nullptr) : json(a.to)}});
    for (const DiagramCrossing& x : d.crossings)
        xs.push_back({{"over", x.over}, {"under_in", x.under_in}, {"under_out", x.under_out}, {"sign", x.sign}});
    json j{{"version", d.version}, {"components", d.components}, {"arcs", arcs}, {"crossings", xs}};
    if (d.direction) j["direction"] = vec_json(*d.direction);
    return j;
}

Diagram diagram_from_json(const json& j) {
    try {
        Diagram d;
        d.version = j.at("version").get<int>();
        d.components = j.at("components").get<std::vector<std::string>>();
        for (const json& a : j.at("arcs")) {
            Arc arc;
            arc.component = a.at("component").get<int>();
            arc.from = a.at("from").is_null() ? -1 : a["from"].get<int>();
            arc.to = a.at("to").is_null() ? -1 : a["to"].get<int>();
            d.arcs.push_back(arc);
        }
        for (const json& x : j.at("crossings"))
            d.crossings.push_back({x.at("over").get<int>(), x.at("under_in").get<int>(), x.at("under_out").get<int>(),
                                   x.at("sign").get<int>()});
        if (j.contains("direction")) d.direction = json_vec(j["direction"]);
        d.validate();
        return d;
    } catch (const json::exception& e) {
        throw ParseError(std::string("diagram: ") + e.what());
    }
}

}  // namespace untangle
