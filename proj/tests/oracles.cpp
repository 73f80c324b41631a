#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

using namespace untangle;

uint64_t brute_tricolor(const Diagram& d) {
    const size_t na = d.arcs.size();
    if (na > 20) throw std::runtime_error("too many arcs for enumeration");
    std::vector<int> col(na, 0);
    uint64_t total = 0;
    for (;;) {
        bool good = true;
        for (const DiagramCrossing& x : d.crossings) {
            int a = col[x.over], b = col[x.under_in], c = col[x.under_out];
            bool same = a == b && b == c;
            bool distinct = a != b && b != c && a != c;
            if (!same && !distinct) {
                good = false;
                break;
            }
        }
        if (good) ++total;
        size_t i = 0;
        while (i < na && col[i] == 2) col[i++] = 0;
        if (i == na) break;
        ++col[i];
    }
    return total;
}

namespace {

Vec3 unit_or_zero(const Vec3& v) {
    double n = norm(v);
    return n > 0 ? v / n : Vec3{};
}

double clamped_asin(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }

}  // namespace

double gauss_linking(const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
    double total = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Vec3& p1 = p[i];
        const Vec3& p2 = p[(i + 1) % p.size()];
        for (size_t j = 0; j < q.size(); ++j) {
            const Vec3& p3 = q[j];
            const Vec3& p4 = q[(j + 1) % q.size()];
            Vec3 r13 = p3 - p1, r14 = p4 - p1, r23 = p3 - p2, r24 = p4 - p2;
            Vec3 n1 = unit_or_zero(cross(r13, r14));
            Vec3 n2 = unit_or_zero(cross(r14, r24));
            Vec3 n3 = unit_or_zero(cross(r24, r23));
            Vec3 n4 = unit_or_zero(cross(r23, r13));
            double omega = clamped_asin(dot(n1, n2)) + clamped_asin(dot(n2, n3)) + clamped_asin(dot(n3, n4)) +
                           clamped_asin(dot(n4, n1));
            double s = dot(cross(p4 - p3, p2 - p1), r13);
            total += s > 0 ? omega : (s < 0 ? -omega : 0);
        }
    }
    return total / (4 * std::numbers::pi);
}

double gauss_linking_quadrature(const std::vector<Vec3>& p, const std::vector<Vec3>& q, int k) {
    auto pieces = [k](const std::vector<Vec3>& c) {
        std::vector<std::pair<Vec3, Vec3>> out;  // midpoint, tangent step
        for (size_t i = 0; i < c.size(); ++i) {
            Vec3 a = c[i], b = c[(i + 1) % c.size()];
            Vec3 step = (b - a) / k;
            for (int s = 0; s < k; ++s) out.push_back({a + step * (s + 0.5), step});
        }
        return out;
    };
    auto P = pieces(p), Q = pieces(q);
    double total = 0;
    for (const auto& [x, dx] : P)
        for (const auto& [y, dy] : Q) {
            Vec3 r = x - y;
            double n = norm(r);
            total += dot(r, cross(dx, dy)) / (n * n * n);
        }
    return total / (4 * std::numbers::pi);
}

double arc_fraction(const Vec2& center, double radius, const Vec2& a, const Vec2& b, int side, int n) {
    int hits = 0;
    for (int k = 0; k < n; ++k) {
        double t = 2 * std::numbers::pi * k / n;
        Vec2 p{center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
        if (side_of(a, b, p) == side) ++hits;
    }
    return static_cast<double>(hits) / n;
}

namespace {

bool proper_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

int lollipop_flood_side(const Vec2& a, const Vec2& b) {
    const int n_pole = 2000, n_circle = 8000;
    std::vector<Vec2> pts;
    for (int i = 0; i <= n_pole; ++i) pts.push_back({0, static_cast<double>(i) / n_pole});
    // Circle samples start right after the junction (0,1) and run back to it.
    for (int k = 1; k < n_circle; ++k) {
        double t = -std::numbers::pi / 2 + 2 * std::numbers::pi * k / n_circle;
        pts.push_back({std::cos(t), 2 + std::sin(t)});
    }
    const int junction = n_pole;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_pole; ++i) edges.push_back({i, i + 1});
    edges.push_back({junction, n_pole + 1});
    for (int k = n_pole + 1; k + 1 < static_cast<int>(pts.size()); ++k) edges.push_back({k, k + 1});
    edges.push_back({static_cast<int>(pts.size()) - 1, junction});

    std::vector<std::vector<int>> adj(pts.size());
    std::vector<std::pair<int, int>> cut;
    for (auto [u, v] : edges) {
        if (proper_cross(pts[u], pts[v], a, b)) {
            cut.push_back({u, v});
        } else {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
    }
    std::vector<char> seen(pts.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
    }
    if (cut.empty()) return -side_of(a, b, pts[0]);
    int sigma = 0;
    for (auto [u, v] : cut) {
        for (int w : {u, v}) {
            if (!seen[w]) continue;
            int s = side_of(a, b, pts[w]);
            if (s == 0 || (sigma != 0 && s != sigma)) return 0;
            sigma = s;
        }
    }
    return -sigma;
}

std::vector<Vec3> circle(const Vec3& center, const Vec3& normal, double radius, int n) {
    CircleT c;
    c.center = center;
    c.normal = normalized(normal);
    c.radius = radius;
    Vec3 u = any_perpendicular(c.normal);
    Vec3 v = cross(c.normal, u);
    std::vector<Vec3> out;
    for (int k = 0; k < n; ++k) {
        double t = 2 * std::numbers::pi * k / n;
        out.push_back(center + u * (radius * std::cos(t)) + v * (radius * std::sin(t)));
    }
    return out;
}

std::vector<Vec3> trefoil(int n, const Vec3& offset) {
    std::vector<Vec3> out;
    for (int k = 0; k < n; ++k) {
        double t = 2 * std::numbers::pi * k / n;
        out.push_back(offset + Vec3{std::sin(t) + 2 * std::sin(2 * t), std::cos(t) - 2 * std::cos(2 * t), -std::sin(3 * t)});
    }
    return out;
}

Diagram any_band_sum(const Diagram& d, int ci, int cj) {
    for (size_t i = 0; i < d.arcs.size(); ++i) {
        if (d.arcs[i].component != ci) continue;
        for (size_t j = 0; j < d.arcs.size(); ++j) {
            if (d.arcs[j].component != cj) continue;
            try {
                return band_sum(d, ci, cj, {static_cast<int>(i), static_cast<int>(j), 0});
            } catch (const DiagramError&) {
            }
        }
    }
    throw std::runtime_error("no legal band site");
}

std::vector<NamedDiagram> fixture_diagrams() {
    auto project = [](std::vector<Curve3> curves, Vec3 dir) {
        ProjectOptions opt;
        opt.direction = normalized(dir);
        return project_diagram(curves, opt);
    };
    const Vec3 z{0, 0, 1};
    Curve3 unknot{"unknot", circle({0, 0, 0}, z, 1)};
    Curve3 far{"far", circle({10, 0, 0}, z, 1)};
    Curve3 far2{"far2", circle({-10, 0, 0}, z, 1)};
    Curve3 hopf_a{"a", circle({0, 0, 0}, z, 1)};
    Curve3 hopf_b{"b", circle({1, 0, 0}, {0, 1, 0}, 1)};
    Curve3 tre{"trefoil", trefoil()};
    Curve3 tre2{"trefoil2", trefoil(96, {0, 12, 0})};
    const Vec3 tilt{0.2, 0.3, 1};

    std::vector<NamedDiagram> out;
    out.push_back({"unknot", project({unknot}, z), 3});
    out.push_back({"hopf", project({hopf_a, hopf_b}, tilt), 3});
    out.push_back({"trefoil", project({tre}, z), 9});
    Diagram tu = project({tre, far}, z);
    out.push_back({"trefoil+unknot", tu, 27});
    Diagram uu = project({far2, far}, z);
    out.push_back({"unknot+unknot", uu, 9});
    Diagram tt = project({tre, tre2}, z);
    out.push_back({"trefoil+trefoil", tt, 81});
    out.push_back({"band(unknot,unknot)", any_band_sum(uu, 0, 1), 3});
    out.push_back({"band(trefoil,unknot)", any_band_sum(tu, 0, 1), 9});
    out.push_back({"band(trefoil,trefoil)", any_band_sum(tt, 0, 1), 27});
    out.push_back({"band(hopf)", any_band_sum(out[1].diagram, 0, 1), 0});
    return out;
}

}  // namespace oracle
