#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "untangle/scene.hpp"

namespace untangle {

struct InvariantUndefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateCrossing : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GenericityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DiagramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reduced word in the free group on a, b. Letters: +1 = a, -1 = A, +2 = b, -2 = B.
class WordF2 {
public:
    WordF2() = default;
    static WordF2 parse(const std::string& s);  // "abA", uppercase = inverse
    void push(int letter);                      // appends and cancels
    const std::vector<int>& letters() const { return letters_; }
    std::string str() const;
    int exponent_sum(int generator) const;
    bool is_reduced() const;
    bool operator==(const WordF2&) const = default;

private:
    std::vector<int> letters_;
};

// Signed crossings of the oriented open rope through disk a and disk b, in rope
// order. `avoid` lists segments (the pole) both disks must clear by `delta`.
WordF2 f2_word(const PolyRope& rope, const DiskT& a, const DiskT& b, const std::vector<SegmentT>& avoid = {},
               double delta = kClearance);
int crossing_index(const PolyRope& rope, const DiskT& d);

// Model A word: a = hoop disk, b = the disk of the lollipop's circle.
WordF2 model_a_word(const Scene& s);
// Model B index of the rope through the middle hoop's disk.
int model_b_index(const Scene& s);

// ---------------------------------------------------------------- diagrams

struct Arc {
    int component = 0;
    int from = -1;  // crossing where the arc starts (under-passage), -1 for a closed arc
    int to = -1;
};

struct DiagramCrossing {
    int over = 0;
    int under_in = 0;
    int under_out = 0;
    int sign = 1;
};

// Projected curves kept with a diagram so it can be redrawn or band-summed.
struct PlanarCurve {
    std::vector<Vec2> pts;
    std::vector<double> depth;  // larger is nearer the viewer
};

struct CrossingPlace {
    int over_comp, under_comp;
    double over_pos, under_pos;  // segment index + parameter
    Vec2 at;
};

struct Diagram {
    int version = 1;
    std::vector<std::string> components;
    std::vector<Arc> arcs;
    std::vector<DiagramCrossing> crossings;
    // Optional geometry.
    std::vector<PlanarCurve> curves;
    std::vector<CrossingPlace> places;
    std::optional<Vec3> direction;

    int component_index(const std::string& id) const;
    void validate() const;  // throws DiagramError
};

struct Curve3 {
    std::string id;
    std::vector<Vec3> pts;  // closed polygon
};

struct ProjectOptions {
    bool auto_direction = false;
    Vec3 direction{0, 0, 1};
    uint64_t seed = 0;
    int retries = 100;
    double min_separation = kClearance;  // 3D clearance the curves must keep
    double tolerance = 1e-9;             // genericity tolerance in the projection plane
};

// Uniform unit vector: rejection sampling in the unit ball from 53-bit doubles.
Vec3 random_direction(std::mt19937_64& g);

// Projection plane frame (e1, e2) with e1 x e2 = d.
std::pair<Vec3, Vec3> projection_frame(const Vec3& d);
PlanarCurve project_curve(const std::vector<Vec3>& pts, const Vec3& d);
// Diagram of planar curves with depths; throws GenericityError.
Diagram diagram_from_planar(const std::vector<std::string>& ids, const std::vector<PlanarCurve>& curves,
                            double tolerance = 1e-9);
Diagram project_diagram(const std::vector<Curve3>& curves, const ProjectOptions& opt = {});

int linking_number(const Diagram& d, int comp_i, int comp_j);
int linking_number(const Diagram& d, const std::string& a, const std::string& b);
int tricolor_nullity(const Diagram& d);
uint64_t tricolor_count(const Diagram& d);

struct BandSite {
    int arc_i = 0;
    int arc_j = 0;
    int half_twists = 0;  // 0 or +-1
};
// Joins two components with a flat band between the two arcs. The band edges
// may not cross the diagram.
Diagram band_sum(const Diagram& d, int comp_i, int comp_j, const BandSite& site);

// ---------------------------------------------------------------- curves from scenes

// Regular n-gon on the spine; n starts at `min_sides` and is raised until the
// sagitta is at most half of (tube + clearance).
std::vector<Vec3> circle_polygon(const CircleT& c, double clearance = kClearance, int min_sides = 64);
std::vector<Curve3> scene_curves(const Scene& s);

// 3D band sum of closed polygons P (edge i) and Q (edge j) along a core path.
std::vector<Vec3> band_along(const std::vector<Vec3>& P, size_t i, const std::vector<Vec3>& Q, size_t j,
                             const std::vector<Vec3>& core, double width = 0.012, double step = 0.03);
// The auxiliary link of a Model C scene: band-summed rope, hoop1, hoop2.
std::vector<Curve3> model_c_band_curves(const Scene& s);

nlohmann::json to_json(const Diagram& d);
Diagram diagram_from_json(const nlohmann::json& j);

}  // namespace untangle
