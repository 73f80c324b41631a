#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "untangle/convex.hpp"

namespace untangle {

Support support_points(std::vector<Vec3> pts) {
    return [pts = std::move(pts)](const Vec3& d) {
        const Vec3* best = &pts.front();
        double bv = dot(*best, d);
        for (const Vec3& p : pts) {
            double v = dot(p, d);
            if (v > bv) { bv = v; best = &p; }
        }
        return *best;
    };
}

Support support_disk(const CircleT& c) {
    return [c](const Vec3& d) {
        Vec3 dp = d - c.normal * dot(d, c.normal);
        double n = norm(dp);
        Vec3 p = n > 1e-300 ? c.center + dp * (c.radius / n) : c.center;
        double dn = norm(d);
        if (c.tube_radius > 0 && dn > 0) p += d * (c.tube_radius / dn);
        return p;
    };
}

Support support_union(std::vector<Support> parts) {
    return [parts = std::move(parts)](const Vec3& d) {
        Vec3 best = parts.front()(d);
        double bv = dot(best, d);
        for (size_t i = 1; i < parts.size(); ++i) {
            Vec3 p = parts[i](d);
            double v = dot(p, d);
            if (v > bv) { bv = v; best = p; }
        }
        return best;
    };
}

namespace {

struct SimplexResult {
    Vec3 v;
    std::vector<Vec3> keep;
};

// Closest point of conv(w) to the origin, by trying every face of the simplex.
SimplexResult closest_on_simplex(const std::vector<Vec3>& w) {
    const int n = static_cast<int>(w.size());
    SimplexResult best{w[0], {w[0]}};
    double best_n = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<Vec3> s;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) s.push_back(w[i]);
        int k = static_cast<int>(s.size());
        std::array<double, 4> lam{1, 0, 0, 0};
        if (k > 1) {
            // Normal equations for the affine hull, solved by Gaussian elimination.
            double G[3][4] = {};
            for (int i = 1; i < k; ++i) {
                for (int j = 1; j < k; ++j) G[i - 1][j - 1] = dot(s[i] - s[0], s[j] - s[0]);
                G[i - 1][k - 1] = -dot(s[i] - s[0], s[0]);
            }
            int m = k - 1;
            bool singular = false;
            for (int c = 0; c < m && !singular; ++c) {
                int piv = c;
                for (int r = c + 1; r < m; ++r)
                    if (std::abs(G[r][c]) > std::abs(G[piv][c])) piv = r;
                if (std::abs(G[piv][c]) < 1e-300) { singular = true; break; }
                for (int j = 0; j <= m; ++j) std::swap(G[c][j], G[piv][j]);
                for (int r = 0; r < m; ++r) {
                    if (r == c) continue;
                    double f = G[r][c] / G[c][c];
                    for (int j = 0; j <= m; ++j) G[r][j] -= f * G[c][j];
                }
            }
            if (singular) continue;
            double sum = 0;
            for (int i = 1; i < k; ++i) {
                lam[i] = G[i - 1][m] / G[i - 1][i - 1];
                sum += lam[i];
            }
            lam[0] = 1 - sum;
            bool inside = true;
            for (int i = 0; i < k; ++i)
                if (lam[i] < 0) inside = false;
            if (!inside) continue;
        }
        Vec3 v{0, 0, 0};
        for (int i = 0; i < k; ++i) v += s[i] * lam[i];
        double vn = norm2(v);
        if (vn < best_n) {
            best_n = vn;
            best = {v, s};
        }
    }
    return best;
}

}  // namespace

double convex_distance(const Support& a, const Support& b, double tol) {
    Vec3 d0{1, 0, 0};
    Vec3 v = a(d0) - b(-d0);
    std::vector<Vec3> w;
    for (int iter = 0; iter < 500; ++iter) {
        double vv = norm2(v);
        if (vv <= 1e-28) return 0;
        Vec3 p = a(-v) - b(v);
        if (vv - dot(v, p) <= tol * vv + 1e-30) return std::sqrt(vv);
        for (const Vec3& q : w)
            if (norm2(q - p) <= 1e-30) return std::sqrt(vv);
        w.push_back(p);
        SimplexResult r = closest_on_simplex(w);
        v = r.v;
        w = r.keep;
        if (w.size() == 4) return 0;
    }
    return norm(v);
}

}  // namespace untangle
