#pragma once

#include <functional>
#include <vector>

#include "untangle/geom.hpp"

namespace untangle {

// A convex body given by its support mapping: the point of the body that is
// furthest along direction d.
using Support = std::function<Vec3(const Vec3& d)>;

Support support_points(std::vector<Vec3> pts);
Support support_disk(const CircleT& c);       // flat disk, inflated by the tube radius
Support support_union(std::vector<Support> parts);  // convex hull of the union

// Euclidean distance between two convex bodies (GJK); 0 when they overlap.
double convex_distance(const Support& a, const Support& b, double tol = 1e-12);

}  // namespace untangle
