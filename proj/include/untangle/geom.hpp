#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace untangle {

inline constexpr double kEps = 1e-9;
inline constexpr double kClearance = 1e-3;

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    bool operator==(const Vec3& o) const = default;
};
inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double norm2(const Vec3& v) { return dot(v, v); }
Vec3 normalized(const Vec3& v);
// Some unit vector perpendicular to n.
Vec3 any_perpendicular(const Vec3& n);
// Rodrigues rotation of v about the unit axis by angle.
Vec3 rotate(const Vec3& v, const Vec3& axis, double angle);

struct Vec2 {
    double x = 0, y = 0;
    Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const = default;
};
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 left_normal(const Vec2& d) { return {-d.y, d.x}; }

struct SegmentT {
    Vec3 a, b;
};

struct TriangleT {
    Vec3 p, q, r;
};

struct CircleT {
    Vec3 center;
    double radius = 1;
    Vec3 normal{0, 0, 1};
    double tube_radius = 0;

    // Orthonormal in-plane frame (u, v) with u x v = normal.
    std::pair<Vec3, Vec3> frame() const;
    Vec3 point_at(double t) const;
};

struct DiskT {
    CircleT circle;
};

// Oriented plane; the allowed side is where (p - point) . normal > 0.
struct PlaneT {
    Vec3 point;
    Vec3 normal{0, 0, 1};
    double signed_distance(const Vec3& p) const { return dot(p - point, normal); }
};

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Validation of the shape invariants; throw GeometryError.
void check_segment(const SegmentT& s);
void check_triangle(const TriangleT& t);

double distance(const Vec3& a, const Vec3& b);
double distance(const Vec3& p, const SegmentT& s);
double distance(const SegmentT& s, const SegmentT& t);
double distance(const Vec3& p, const TriangleT& t);
double distance(const SegmentT& s, const TriangleT& t);
double distance(const TriangleT& a, const TriangleT& b);
double distance(const Vec3& p, const CircleT& c);
double distance(const SegmentT& s, const CircleT& c);
double distance(const TriangleT& t, const CircleT& c);
double distance(const CircleT& a, const CircleT& b);

Vec3 closest_point(const Vec3& p, const SegmentT& s);
Vec3 closest_point(const Vec3& p, const TriangleT& t);
bool segment_intersects_triangle(const SegmentT& s, const TriangleT& t);

// Minimum signed height of a shape above a plane (negative when crossing it).
double plane_height(const SegmentT& s, const PlaneT& pl);
double plane_height(const TriangleT& t, const PlaneT& pl);
double plane_height(const CircleT& c, const PlaneT& pl);
// Same, ignoring every point within `radius` of `exempt` (a vertex of the shape).
double plane_height_outside_ball(const SegmentT& s, const PlaneT& pl, const Vec3& exempt, double radius);
double plane_height_outside_ball(const TriangleT& t, const PlaneT& pl, const Vec3& exempt, double radius);

enum class Crossing { Plus, Minus, None, Degenerate };
int crossing_sign(Crossing c);

// Crossing of the open segment with the open flat disk; points within kEps of
// the disk plane count as lying on its positive side.
Crossing seg_disk_crossing(const SegmentT& s, const DiskT& d, double eps = kEps);
// Parameter along s of the plane crossing (valid when the result is Plus/Minus).
double seg_disk_parameter(const SegmentT& s, const DiskT& d, double eps = kEps);

struct Obstacle {
    enum class Kind { Segment, Circle, Polyline, Plane } kind = Kind::Segment;
    std::string name;
    SegmentT segment;
    CircleT circle;
    std::vector<Vec3> polyline;
    bool closed = false;
    PlaneT plane;
};

struct ClearReport {
    bool ok = true;
    std::string obstacle;
    double distance = 0;
};

// The solid triangle keeps clearance >= delta from every obstacle (circles are
// inflated by their tube radius).
ClearReport triangle_clear(const TriangleT& t, const std::vector<Obstacle>& obstacles,
                           double delta = kClearance);

// Side selectors, in the plane. SideLabel is +1 for the side the segment's
// left normal points to, -1 for the other.
struct Circle2 {
    Vec2 center;
    double radius = 1;
};
int side_of(const Vec2& a, const Vec2& b, const Vec2& p);
int select_minor_side(const Circle2& c, const Vec2& a, const Vec2& b, double eps = kEps);
int select_lollipop_side(const Vec2& a, const Vec2& b, double eps = kEps);

}  // namespace untangle
