#include "untangle/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "untangle/invariants.hpp"

namespace untangle {

namespace {

struct Strand {
    std::string name;
    std::string group;  // crossings inside one group are not drawn as gaps
    std::string cls;
    std::vector<Vec3> pts;
    bool closed = false;
    double tube = 0;
    std::vector<std::pair<size_t, std::string>> pins;  // (vertex, group) for attached rope ends

    bool pinned(size_t vertex, const std::string& g) const {
        for (const auto& [v, grp] : pins)
            if (v == vertex && grp == g) return true;
        return false;
    }
};

std::vector<Strand> strands_of(const Scene& s) {
    std::vector<Strand> out;
    for (const RigidPiece& p : s.pieces) {
        for (const PiecePart& part : parts_of(p)) {
            if (part.segment) {
                out.push_back({part.name, p.id, "piece", {part.segment->a, part.segment->b}, false, 0, {}});
            } else {
                out.push_back({part.name, p.id, "piece", circle_polygon(*part.circle, s.clearance), true,
                               part.circle->tube_radius, {}});
            }
        }
    }
    for (const PolyRope& r : s.ropes) {
        Strand st{r.id, r.id, "rope", r.vertices, r.closed, 0, {}};
        for (const RigidPiece& p : s.pieces)
            for (const Attachment& a : p.attachments)
                if (a.rope == r.id) st.pins.push_back({a.end == "start" ? 0 : r.vertices.size() - 1, p.id});
        out.push_back(std::move(st));
    }
    return out;
}

size_t edge_count(const Strand& st) { return st.closed ? st.pts.size() : st.pts.size() - 1; }

struct Under {
    size_t strand;
    double pos;  // edge index + parameter
    size_t over;
};

struct Planar {
    std::vector<std::vector<Vec2>> pts;
    std::vector<Under> unders;
};

double point_seg_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 r = b - a;
    double t = std::clamp(dot(p - a, r) / dot(r, r), 0.0, 1.0);
    return norm(p - (a + r * t));
}

// Crossings of all strands under one direction; throws GenericityError.
Planar planar(const std::vector<Strand>& strands, const Vec3& dir) {
    const double tol = 1e-9;
    Planar out;
    std::vector<std::vector<double>> depth;
    for (const Strand& st : strands) {
        PlanarCurve pc = project_curve(st.pts, dir);
        out.pts.push_back(pc.pts);
        depth.push_back(pc.depth);
    }
    struct E {
        size_t c, k;
    };
    std::vector<E> edges;
    for (size_t c = 0; c < strands.size(); ++c)
        for (size_t k = 0; k < edge_count(strands[c]); ++k) {
            const auto& p = out.pts[c];
            if (norm(p[(k + 1) % p.size()] - p[k]) <= tol) throw GenericityError("an edge projects to a point");
            edges.push_back({c, k});
        }
    auto ends = [&](const E& e) {
        const auto& p = out.pts[e.c];
        return std::pair<Vec2, Vec2>{p[e.k], p[(e.k + 1) % p.size()]};
    };
    auto same_group = [&](const E& a, const E& b) { return strands[a.c].group == strands[b.c].group && a.c != b.c; };
    // An attached rope end sits on its piece; nothing there is a crossing.
    auto edge_pinned = [&](const E& e, const std::string& g) {
        const Strand& st = strands[e.c];
        return st.pinned(e.k, g) || st.pinned((e.k + 1) % st.pts.size(), g);
    };
    auto adjacent = [&](const E& a, const E& b) {
        if (edge_pinned(a, strands[b.c].group) || edge_pinned(b, strands[a.c].group)) return true;
        if (a.c != b.c) return false;
        size_t n = out.pts[a.c].size();
        return (a.k + 1) % n == b.k || (b.k + 1) % n == a.k;
    };
    for (const E& e : edges) {
        auto [a, b] = ends(e);
        for (size_t c = 0; c < strands.size(); ++c) {
            if (strands[c].group == strands[e.c].group && c != e.c) continue;
            if (edge_pinned(e, strands[c].group)) continue;
            const auto& p = out.pts[c];
            for (size_t k = 0; k < p.size(); ++k) {
                if (c == e.c && (k == e.k || k == (e.k + 1) % p.size())) continue;
                if (strands[c].pinned(k, strands[e.c].group)) continue;
                if (point_seg_dist(p[k], a, b) <= tol)
                    throw GenericityError("a vertex of " + strands[c].name + " projects onto an edge of " +
                                          strands[e.c].name);
            }
        }
    }
    std::vector<Vec2> spots;
    for (size_t i = 0; i < edges.size(); ++i) {
        for (size_t j = i + 1; j < edges.size(); ++j) {
            const E& s = edges[i];
            const E& t = edges[j];
            if (adjacent(s, t) || same_group(s, t)) continue;
            auto [sa, sb] = ends(s);
            auto [ta, tb] = ends(t);
            Vec2 r = sb - sa, q = tb - ta;
            double den = cross(r, q);
            if (std::abs(den) <= 1e-12 * norm(r) * norm(q)) continue;
            Vec2 w = ta - sa;
            double u = cross(w, q) / den, v = cross(w, r) / den;
            if (u <= 0 || u >= 1 || v <= 0 || v >= 1) continue;
            if (std::abs(den) < 1e-6 * norm(r) * norm(q)) throw GenericityError("near-tangent crossing");
            const auto& ds = depth[s.c];
            const auto& dt = depth[t.c];
            double zs = ds[s.k] + u * (ds[(s.k + 1) % ds.size()] - ds[s.k]);
            double zt = dt[t.k] + v * (dt[(t.k + 1) % dt.size()] - dt[t.k]);
            if (std::abs(zs - zt) <= tol) throw GenericityError("strands meet in space");
            Vec2 at = sa + r * u;
            for (const Vec2& x : spots)
                if (norm(x - at) <= tol) throw GenericityError("triple point");
            spots.push_back(at);
            if (zs > zt)
                out.unders.push_back({t.c, t.k + v, s.c});
            else
                out.unders.push_back({s.c, s.k + u, t.c});
        }
    }
    return out;
}

Planar planar_with_retry(const std::vector<Strand>& strands, const ExportOptions& opt, Vec3& used) {
    std::mt19937_64 g(opt.seed);
    std::string last;
    {
        // Default view: mostly along +y with a slight tilt, so xz-plane circles read as circles.
        Vec3 d = opt.direction.value_or(Vec3{0.25, 1, 0.35});
        if (norm(d) <= kEps) throw GenericityError("projection direction is zero");
        try {
            used = normalized(d);
            return planar(strands, used);
        } catch (const GenericityError& e) {
            if (!opt.auto_retry) throw;
            last = e.what();
        }
    }
    for (int i = 0; i < opt.retries; ++i) {
        used = random_direction(g);
        try {
            return planar(strands, used);
        } catch (const GenericityError& e) {
            last = e.what();
        }
    }
    throw GenericityError("no generic direction after " + std::to_string(opt.retries) + " tries: " + last);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    return s == "-0.000" ? "0.000" : s;
}

}  // namespace

std::string export_svg(const Scene& s, const ExportOptions& opt) {
    std::vector<Strand> strands = strands_of(s);
    Vec3 dir;
    Planar pl = planar_with_retry(strands, opt, dir);

    const double inf = std::numeric_limits<double>::infinity();
    double x0 = inf, y0 = inf, x1 = -inf, y1 = -inf;
    for (size_t c = 0; c < strands.size(); ++c) {
        double pad = strands[c].tube;
        for (const Vec2& p : pl.pts[c]) {
            x0 = std::min(x0, p.x - pad);
            x1 = std::max(x1, p.x + pad);
            y0 = std::min(y0, p.y - pad);
            y1 = std::max(y1, p.y + pad);
        }
    }
    const double margin = 20;
    const double scale = (opt.width - 2 * margin) / std::max(x1 - x0, 1e-9);
    const double height = (y1 - y0) * scale + 2 * margin;
    auto X = [&](const Vec2& p) { return fmt(margin + (p.x - x0) * scale); };
    auto Y = [&](const Vec2& p) { return fmt(height - margin - (p.y - y0) * scale); };
    auto stroke = [&](const Strand& st) { return st.tube > 0 ? std::max(2.0, 2 * st.tube * scale) : 2.0; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(opt.width) << "\" height=\"" << fmt(height)
      << "\" viewBox=\"0 0 " << fmt(opt.width) << " " << fmt(height) << "\">\n";
    o << "<!-- direction " << fmt(dir.x) << " " << fmt(dir.y) << " " << fmt(dir.z) << " -->\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (size_t c = 0; c < strands.size(); ++c) {
        const Strand& st = strands[c];
        const auto& p = pl.pts[c];
        const size_t ne = edge_count(st);
        // Arc length in px at each vertex.
        std::vector<double> at(ne + 1, 0);
        for (size_t k = 0; k < ne; ++k) at[k + 1] = at[k] + norm(p[(k + 1) % p.size()] - p[k]) * scale;
        const double total = at[ne];
        std::vector<std::pair<double, double>> cuts;
        for (const Under& u : pl.unders) {
            if (u.strand != c) continue;
            size_t k = static_cast<size_t>(u.pos);
            double t = u.pos - static_cast<double>(k);
            double m = at[k] + t * (at[k + 1] - at[k]);
            const double gap_px = 4 + 0.5 * stroke(strands[u.over]);
            cuts.push_back({m - gap_px, m + gap_px});
            if (st.closed) {
                cuts.push_back({m - gap_px + total, m + gap_px + total});
                cuts.push_back({m - gap_px - total, m + gap_px - total});
            }
        }
        auto point_at = [&](double len) {
            size_t k = std::upper_bound(at.begin(), at.end(), len) - at.begin();
            k = std::clamp<size_t>(k, 1, ne) - 1;
            double seg = at[k + 1] - at[k];
            double t = seg > 0 ? (len - at[k]) / seg : 0;
            return p[k] + (p[(k + 1) % p.size()] - p[k]) * t;
        };
        auto visible = [&](double len) {
            for (auto& [a, b] : cuts)
                if (len > a && len < b) return false;
            return true;
        };
        // Break the strand into visible pieces at the cut boundaries.
        std::vector<double> marks(at.begin(), at.end());
        for (auto& [a, b] : cuts) {
            if (a > 0 && a < total) marks.push_back(a);
            if (b > 0 && b < total) marks.push_back(b);
        }
        std::sort(marks.begin(), marks.end());
        std::string w = fmt(stroke(st));
        std::string color = st.cls == "rope" ? "#b5651d" : "#333333";
        o << "<g id=\"" << st.name << "\" class=\"" << st.cls << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"" << w << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
        std::string path;
        bool open = false;
        for (size_t i = 0; i + 1 < marks.size(); ++i) {
            double a = marks[i], b = marks[i + 1];
            if (b - a <= 1e-9) continue;
            if (!visible(0.5 * (a + b))) {
                open = false;
                continue;
            }
            if (!open) {
                Vec2 q = point_at(a);
                path += (path.empty() ? "M" : " M") + X(q) + " " + Y(q);
                open = true;
            }
            Vec2 q = point_at(b);
            path += " L" + X(q) + " " + Y(q);
        }
        if (!path.empty()) o << "<path d=\"" << path << "\"/>\n";
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

namespace {

struct ObjWriter {
    std::ostringstream o;
    size_t nv = 0;

    size_t vertex(const Vec3& p) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "v %.6f %.6f %.6f\n", p.x, p.y, p.z);
        o << buf;
        return ++nv;
    }

    void polyline(const std::vector<Vec3>& pts, bool closed) {
        size_t first = nv + 1;
        for (const Vec3& p : pts) vertex(p);
        o << "l";
        for (size_t k = 0; k < pts.size(); ++k) o << " " << first + k;
        if (closed) o << " " << first;
        o << "\n";
    }

    // Tube of radius r around the polyline, parallel-transported frames.
    void tube(const std::vector<Vec3>& pts, bool closed, double r, int sides) {
        const size_t n = pts.size();
        std::vector<Vec3> tan(n);
        for (size_t k = 0; k < n; ++k) {
            Vec3 prev = k > 0 ? pts[k] - pts[k - 1] : (closed ? pts[0] - pts[n - 1] : pts[1] - pts[0]);
            Vec3 next = k + 1 < n ? pts[k + 1] - pts[k] : (closed ? pts[0] - pts[n - 1] : pts[n - 1] - pts[n - 2]);
            Vec3 t = normalized(prev) + normalized(next);
            tan[k] = norm(t) > kEps ? normalized(t) : normalized(next);
        }
        Vec3 u = any_perpendicular(tan[0]);
        size_t first = nv + 1;
        for (size_t k = 0; k < n; ++k) {
            u = normalized(u - tan[k] * dot(u, tan[k]));
            Vec3 v = cross(tan[k], u);
            for (int j = 0; j < sides; ++j) {
                double a = 2 * std::numbers::pi * j / sides;
                vertex(pts[k] + (u * std::cos(a) + v * std::sin(a)) * r);
            }
        }
        const size_t rings = closed ? n : n - 1;
        for (size_t k = 0; k < rings; ++k) {
            size_t a = first + k * sides, b = first + ((k + 1) % n) * sides;
            for (int j = 0; j < sides; ++j) {
                int j1 = (j + 1) % sides;
                o << "f " << a + j << " " << b + j << " " << b + j1 << " " << a + j1 << "\n";
            }
        }
    }
};

}  // namespace

std::string export_obj(const Scene& s, const ExportOptions& opt) {
    ObjWriter w;
    w.o << "# untangle scene " << s.model_tag << "\n";
    for (const RigidPiece& p : s.pieces) {
        w.o << "g " << p.id << "\n";
        for (const PiecePart& part : parts_of(p)) {
            if (part.segment) {
                w.polyline({part.segment->a, part.segment->b}, false);
            } else if (part.circle->tube_radius > 0) {
                w.tube(circle_polygon(*part.circle, s.clearance), true, part.circle->tube_radius, opt.tube_sides);
            } else {
                w.polyline(circle_polygon(*part.circle, s.clearance), true);
            }
        }
    }
    for (const PolyRope& r : s.ropes) {
        w.o << "g " << r.id << "\n";
        w.tube(r.vertices, r.closed, opt.rope_radius, opt.tube_sides);
    }
    return w.o.str();
}

}  // namespace untangle
