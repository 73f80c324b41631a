#include "untangle/geom.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace untangle {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    if (n == 0) throw GeometryError("cannot normalize a zero vector");
    return v / n;
}

Vec3 any_perpendicular(const Vec3& n) {
    Vec3 a = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    return normalized(cross(n, a));
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return v * c + cross(axis, v) * s + axis * (dot(axis, v) * (1 - c));
}

std::pair<Vec3, Vec3> CircleT::frame() const {
    Vec3 u = any_perpendicular(normal);
    return {u, cross(normal, u)};
}

Vec3 CircleT::point_at(double t) const {
    auto [u, v] = frame();
    return center + (u * std::cos(t) + v * std::sin(t)) * radius;
}

void check_segment(const SegmentT& s) {
    if (norm(s.b - s.a) <= kEps) throw GeometryError("degenerate segment (zero length)");
}

void check_triangle(const TriangleT& t) {
    if (norm(cross(t.q - t.p, t.r - t.p)) * 0.5 <= kEps) throw GeometryError("degenerate triangle (zero area)");
}

double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

Vec3 closest_point(const Vec3& p, const SegmentT& s) {
    Vec3 d = s.b - s.a;
    double l2 = norm2(d);
    if (l2 == 0) return s.a;
    double t = std::clamp(dot(p - s.a, d) / l2, 0.0, 1.0);
    return s.a + d * t;
}

double distance(const Vec3& p, const SegmentT& s) { return norm(p - closest_point(p, s)); }

double distance(const SegmentT& s1, const SegmentT& s2) {
    // Closest points of two segments (Ericson, RTCD 5.1.9).
    Vec3 d1 = s1.b - s1.a, d2 = s2.b - s2.a, r = s1.a - s2.a;
    double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    double s, t;
    if (a <= 1e-300 && e <= 1e-300) return norm(r);
    if (a <= 1e-300) {
        s = 0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = dot(d1, r);
        if (e <= 1e-300) {
            t = 0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = dot(d1, d2), den = a * e - b * b;
            s = den > 1e-18 * a * e ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return norm((s1.a + d1 * s) - (s2.a + d2 * t));
}

Vec3 closest_point(const Vec3& p, const TriangleT& tr) {
    // Voronoi-region walk (Ericson, RTCD 5.1.5).
    const Vec3 &a = tr.p, &b = tr.q, &c = tr.r;
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0) return a;
    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    double den = 1 / (va + vb + vc);
    return a + ab * (vb * den) + ac * (vc * den);
}

double distance(const Vec3& p, const TriangleT& t) { return norm(p - closest_point(p, t)); }

bool segment_intersects_triangle(const SegmentT& s, const TriangleT& t) {
    Vec3 n = cross(t.q - t.p, t.r - t.p);
    double da = dot(s.a - t.p, n), db = dot(s.b - t.p, n);
    if ((da > 0 && db > 0) || (da < 0 && db < 0)) return false;
    if (da == db) return false;  // parallel; coplanar contact is caught by edge distances
    double u = da / (da - db);
    Vec3 x = s.a + (s.b - s.a) * u;
    Vec3 c1 = cross(t.q - t.p, x - t.p), c2 = cross(t.r - t.q, x - t.q), c3 = cross(t.p - t.r, x - t.r);
    double e1 = dot(c1, n), e2 = dot(c2, n), e3 = dot(c3, n);
    return (e1 >= 0 && e2 >= 0 && e3 >= 0) || (e1 <= 0 && e2 <= 0 && e3 <= 0);
}

double distance(const SegmentT& s, const TriangleT& t) {
    if (segment_intersects_triangle(s, t)) return 0;
    double d = std::min(distance(s.a, t), distance(s.b, t));
    d = std::min(d, distance(s, SegmentT{t.p, t.q}));
    d = std::min(d, distance(s, SegmentT{t.q, t.r}));
    d = std::min(d, distance(s, SegmentT{t.r, t.p}));
    return d;
}

double distance(const TriangleT& a, const TriangleT& b) {
    double d = kInf;
    for (const SegmentT& e : {SegmentT{a.p, a.q}, SegmentT{a.q, a.r}, SegmentT{a.r, a.p}}) d = std::min(d, distance(e, b));
    for (const SegmentT& e : {SegmentT{b.p, b.q}, SegmentT{b.q, b.r}, SegmentT{b.r, b.p}}) d = std::min(d, distance(e, a));
    return d;
}

double distance(const Vec3& p, const CircleT& c) {
    Vec3 w = p - c.center;
    double h = dot(w, c.normal);
    double rho = norm(w - c.normal * h);
    return std::hypot(h, rho - c.radius);
}

namespace {

// Minimum over the circle of f(point), by dense sampling and golden-section
// refinement of every sampled local minimum.
template <class F>
double min_over_circle(const CircleT& c, F&& f, int samples = 128) {
    auto [u, v] = c.frame();
    auto at = [&](double t) { return c.center + (u * std::cos(t) + v * std::sin(t)) * c.radius; };
    std::vector<double> vals(samples);
    double h = kTwoPi / samples;
    for (int k = 0; k < samples; ++k) vals[k] = f(at(k * h));
    auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
    double best = *lo_it;
    // Flat profile (coaxial circles): nothing to refine.
    if (*hi_it - best <= 1e-12 * (1 + best)) return best;
    // f is 1-Lipschitz in the point, so a bracket cannot beat vals[k] - radius * h.
    const double reach = c.radius * h;
    std::vector<int> minima;
    for (int k = 0; k < samples; ++k) {
        double prev = vals[(k + samples - 1) % samples], next = vals[(k + 1) % samples];
        if (vals[k] <= prev && vals[k] <= next) minima.push_back(k);
    }
    std::sort(minima.begin(), minima.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const double g = 0.6180339887498949;
    for (int k : minima) {
        if (vals[k] - reach >= best) break;
        double lo = (k - 1) * h, hi = (k + 1) * h;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = f(at(x1)), f2 = f(at(x2));
        while (hi - lo > 1e-13) {
            if (f1 < f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - g * (hi - lo); f1 = f(at(x1));
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + g * (hi - lo); f2 = f(at(x2));
            }
        }
        best = std::min({best, f1, f2});
    }
    return best;
}

}  // namespace

double distance(const SegmentT& s, const CircleT& c) {
    return min_over_circle(c, [&](const Vec3& p) { return distance(p, s); });
}

double distance(const TriangleT& t, const CircleT& c) {
    return min_over_circle(c, [&](const Vec3& p) { return distance(p, t); });
}

double distance(const CircleT& a, const CircleT& b) {
    // Sample the larger circle, evaluate the closed form against the other.
    const CircleT& s = a.radius >= b.radius ? a : b;
    const CircleT& o = a.radius >= b.radius ? b : a;
    return min_over_circle(s, [&](const Vec3& p) { return distance(p, o); }, 256);
}

double plane_height(const SegmentT& s, const PlaneT& pl) {
    return std::min(pl.signed_distance(s.a), pl.signed_distance(s.b));
}

double plane_height(const TriangleT& t, const PlaneT& pl) {
    return std::min({pl.signed_distance(t.p), pl.signed_distance(t.q), pl.signed_distance(t.r)});
}

double plane_height(const CircleT& c, const PlaneT& pl) {
    double cn = dot(c.normal, pl.normal);
    return pl.signed_distance(c.center) - c.radius * std::sqrt(std::max(0.0, 1 - cn * cn));
}

namespace {

// Parameters t in [0,1] where |a + t(b-a) - e| = r.
std::vector<double> sphere_hits(const Vec3& a, const Vec3& b, const Vec3& e, double r) {
    Vec3 d = b - a, w = a - e;
    double A = dot(d, d), B = 2 * dot(d, w), C = dot(w, w) - r * r;
    std::vector<double> out;
    if (A == 0) return out;
    double disc = B * B - 4 * A * C;
    if (disc < 0) return out;
    double sq = std::sqrt(disc);
    for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
        if (t >= 0 && t <= 1) out.push_back(t);
    return out;
}

}  // namespace

double plane_height_outside_ball(const SegmentT& s, const PlaneT& pl, const Vec3& exempt, double radius) {
    double best = kInf;
    for (const Vec3& p : {s.a, s.b})
        if (norm(p - exempt) >= radius) best = std::min(best, pl.signed_distance(p));
    for (double t : sphere_hits(s.a, s.b, exempt, radius))
        best = std::min(best, pl.signed_distance(s.a + (s.b - s.a) * t));
    return best;
}

double plane_height_outside_ball(const TriangleT& t, const PlaneT& pl, const Vec3& exempt, double radius) {
    double best = kInf;
    std::array<Vec3, 3> v{t.p, t.q, t.r};
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = v[i];
        const Vec3& b = v[(i + 1) % 3];
        if (norm(a - exempt) >= radius) best = std::min(best, pl.signed_distance(a));
        for (double s : sphere_hits(a, b, exempt, radius)) best = std::min(best, pl.signed_distance(a + (b - a) * s));
    }
    // Lowest point of the sphere/plane circle, if it lies inside the triangle.
    Vec3 n = normalized(cross(t.q - t.p, t.r - t.p));
    double off = dot(exempt - t.p, n);
    double rr = radius * radius - off * off;
    if (rr > 0) {
        Vec3 c = exempt - n * off;
        Vec3 g = pl.normal - n * dot(pl.normal, n);
        if (norm(g) > 1e-15) {
            Vec3 low = c - normalized(g) * std::sqrt(rr);
            if (norm(low - closest_point(low, t)) <= 1e-12) best = std::min(best, pl.signed_distance(low));
        }
    }
    return best;
}

int crossing_sign(Crossing c) {
    switch (c) {
        case Crossing::Plus: return 1;
        case Crossing::Minus: return -1;
        default: return 0;
    }
}

namespace {
int side_with_tie(double d, double eps) { return d < -eps ? -1 : 1; }
}  // namespace

Crossing seg_disk_crossing(const SegmentT& s, const DiskT& d, double eps) {
    const CircleT& c = d.circle;
    double d0 = dot(s.a - c.center, c.normal), d1 = dot(s.b - c.center, c.normal);
    if (std::abs(d0) <= eps && std::abs(d1) <= eps) {
        Vec3 q = closest_point(c.center, s);
        return norm(q - c.center) <= c.radius + eps ? Crossing::Degenerate : Crossing::None;
    }
    int s0 = side_with_tie(d0, eps), s1 = side_with_tie(d1, eps);
    if (s0 == s1) return Crossing::None;
    double t = d0 / (d0 - d1);
    Vec3 p = s.a + (s.b - s.a) * t;
    Vec3 w = p - c.center;
    double rho = norm(w - c.normal * dot(w, c.normal));
    if (std::abs(rho - c.radius) <= eps) return Crossing::Degenerate;
    if (rho > c.radius) return Crossing::None;
    return dot(s.b - s.a, c.normal) > 0 ? Crossing::Plus : Crossing::Minus;
}

double seg_disk_parameter(const SegmentT& s, const DiskT& d, double) {
    const CircleT& c = d.circle;
    double d0 = dot(s.a - c.center, c.normal), d1 = dot(s.b - c.center, c.normal);
    return d0 / (d0 - d1);
}

ClearReport triangle_clear(const TriangleT& t, const std::vector<Obstacle>& obstacles, double delta) {
    check_triangle(t);
    for (const Obstacle& o : obstacles) {
        double d = kInf;
        switch (o.kind) {
            case Obstacle::Kind::Segment:
                d = distance(o.segment, t);
                break;
            case Obstacle::Kind::Circle: {
                const CircleT& c = o.circle;
                double need = c.tube_radius + delta;
                double dc = distance(c.center, t);
                double far = 0;
                for (const Vec3& p : {t.p, t.q, t.r}) far = std::max(far, norm(p - c.center));
                PlaneT pl{c.center, c.normal};
                double h0 = pl.signed_distance(t.p), h1 = pl.signed_distance(t.q), h2 = pl.signed_distance(t.r);
                double plane_gap = (h0 > 0 && h1 > 0 && h2 > 0) || (h0 < 0 && h1 < 0 && h2 < 0)
                                       ? std::min({std::abs(h0), std::abs(h1), std::abs(h2)})
                                       : 0.0;
                double lower = std::max({dc - c.radius, c.radius - far, plane_gap});
                if (lower >= need) continue;
                d = distance(t, c) - c.tube_radius;
                break;
            }
            case Obstacle::Kind::Polyline: {
                size_t n = o.polyline.size();
                size_t m = o.closed ? n : n - 1;
                for (size_t i = 0; i < m && n >= 2; ++i)
                    d = std::min(d, distance(SegmentT{o.polyline[i], o.polyline[(i + 1) % n]}, t));
                break;
            }
            case Obstacle::Kind::Plane:
                d = plane_height(t, o.plane);
                break;
        }
        if (d < delta) return {false, o.name, d};
    }
    return {};
}

int side_of(const Vec2& a, const Vec2& b, const Vec2& p) {
    double s = dot(p - a, left_normal(b - a));
    return s > 0 ? 1 : (s < 0 ? -1 : 0);
}

int select_minor_side(const Circle2& c, const Vec2& a, const Vec2& b, double eps) {
    if (c.radius < 1 - eps) throw PreconditionError("circle radius must be >= 1");
    Vec2 d = b - a;
    double len = norm(d);
    if (len <= eps) throw PreconditionError("degenerate chord");
    if (len > 1 + eps) throw PreconditionError("chord longer than 1");
    for (const Vec2& p : {a, b})
        if (norm(p - c.center) < c.radius - eps) throw PreconditionError("chord endpoint inside the circle");
    // Line/circle intersection parameters must both lie on the segment.
    Vec2 w = a - c.center;
    double A = dot(d, d), B = 2 * dot(d, w), C = dot(w, w) - c.radius * c.radius;
    double disc = B * B - 4 * A * C;
    double line_dist = std::abs(cross(d, w)) / len;
    if (disc <= 0 || line_dist >= c.radius - eps) throw PreconditionError("segment does not cut the circle twice");
    double sq = std::sqrt(disc);
    double t0 = (-B - sq) / (2 * A), t1 = (-B + sq) / (2 * A);
    if (t0 < -eps / len || t1 > 1 + eps / len) throw PreconditionError("cut points not on the segment");
    int sc = side_of(a, b, c.center);
    if (sc == 0) throw PreconditionError("chord through the center");
    return -sc;
}

int select_lollipop_side(const Vec2& a, const Vec2& b, double eps) {
    const Vec2 base{0, 0}, junction{0, 1}, center{0, 2};
    const double r = 1;
    Vec2 d = b - a;
    double len = norm(d);
    if (len <= eps) throw PreconditionError("degenerate segment");
    auto dist_seg = [](const Vec2& p, const Vec2& s0, const Vec2& s1) {
        Vec2 e = s1 - s0;
        double l2 = dot(e, e);
        double t = l2 > 0 ? std::clamp(dot(p - s0, e) / l2, 0.0, 1.0) : 0.0;
        return norm(p - (s0 + e * t));
    };
    for (const Vec2& p : {a, b}) {
        if (std::abs(norm(p - center) - r) <= eps) throw PreconditionError("segment end touches the circle");
        if (norm(p - center) < r) throw PreconditionError("segment end inside the circle");
        if (dist_seg(p, base, junction) <= eps) throw PreconditionError("segment end touches the pole");
    }
    if (dist_seg(base, a, b) <= eps) throw PreconditionError("segment passes through (0,0)");

    // Pole cut: proper intersection of the segment with the pole.
    double den = cross(d, junction - base);
    bool pole_cut = false;
    if (std::abs(den) > 1e-15) {
        double t = cross(base - a, junction - base) / den;
        double u = cross(base - a, d) / den;
        if (t > 0 && t < 1 && u > -eps && u < 1 + eps) {
            if (u >= 1 - eps) throw PreconditionError("cut at the junction");
            pole_cut = true;
        }
    } else if (std::abs(cross(d, base - a)) / len <= eps) {
        throw PreconditionError("segment along the pole");
    }
    if (pole_cut) {
        int s = side_of(a, b, base);
        if (s == 0) throw PreconditionError("degenerate pole cut");
        return -s;
    }
    // Circle cut: both ends are outside, so a cut means two crossings.
    double lc = dist_seg(center, a, b);
    if (std::abs(lc - r) <= eps) throw PreconditionError("segment tangent to the circle");
    if (lc < r) {
        int s = side_of(a, b, junction);
        if (s == 0 || std::abs(dot(junction - a, left_normal(d))) / len <= eps)
            throw PreconditionError("cut through the junction");
        return -s;
    }
    int s = side_of(a, b, base);
    if (s == 0) throw PreconditionError("(0,0) on the segment's line");
    return -s;
}

}  // namespace untangle
