#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "untangle/geom.hpp"

namespace untangle {

struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Attachment {
    std::string rope;
    std::string end;  // "start" or "end"
    Vec3 point;
    bool operator==(const Attachment&) const = default;
};

enum class PieceKind { PoleSegment, Circle, Lollipop };

struct RigidPiece {
    std::string id;
    PieceKind kind = PieceKind::Circle;
    std::optional<SegmentT> segment;
    std::optional<CircleT> circle;
    bool movable = false;
    std::vector<Attachment> attachments;

    // Rotation center for rigid steps: circle center, else segment midpoint.
    Vec3 reference() const;
    // Largest distance of a point of the (solid) piece from reference().
    double circumradius() const;
};

struct PolyRope {
    std::string id;
    std::vector<Vec3> vertices;
    bool closed = false;
    std::vector<Vec3> pinned;  // fixed endpoints (open ropes), in start/end order
    std::optional<double> length_budget;

    double perimeter() const;
    size_t edge_count() const { return closed ? vertices.size() : vertices.size() - 1; }
    SegmentT edge(size_t i) const { return {vertices[i], vertices[(i + 1) % vertices.size()]}; }
};

struct Goal {
    enum class Type { Pose, Separation } type = Type::Pose;
    std::string piece;
    CircleT target;
    std::vector<std::vector<std::string>> groups;
};

struct Scene {
    int version = 1;
    std::string model_tag;
    double clearance = kClearance;
    std::vector<RigidPiece> pieces;
    std::vector<PolyRope> ropes;
    std::vector<PlaneT> forbidden_planes;
    Goal goal;
    std::vector<std::string> regime_tags;

    const RigidPiece* find_piece(const std::string& id) const;
    RigidPiece* find_piece(const std::string& id);
    const PolyRope* find_rope(const std::string& id) const;
    PolyRope* find_rope(const std::string& id);
    bool has_tag(const std::string& tag) const;
};

Scene build_model_a(double r);
Scene build_model_b(double r_left, double r_right, double r_hoop, double rope_slack);
Scene build_model_c(double r_hoop, double tube, double rope_length);

// Model C fixture quantities shared with the canonical band site.
struct ModelCLayout {
    double r_hoop, tube, h, g, zc, y2, a2, b2;
    Vec3 hoop2_center() const { return {r_hoop + g, 0, zc}; }
    double hoop2_low() const;  // z of hoop2 at y = y2, lower branch
};
ModelCLayout model_c_layout(double r_hoop, double tube);

// Rope points within this many clearances of a pinned endpoint are exempt
// from forbidden-plane clearance.
inline constexpr double kPinBallFactor = 2;

// Clearance rules between the parts of a scene.
struct ContactPolicy {
    bool rope_vs_piece(const Scene& s, const PolyRope& r, const RigidPiece& p) const;
    bool rope_vs_rope(const Scene& s) const;
    bool rope_self(const Scene& s) const;
    bool piece_vs_piece(const Scene& s, const RigidPiece& a, const RigidPiece& b) const;
};

struct Violation {
    std::string subject;
    std::string obstacle;
    double distance = 0;
    std::string what;
    std::string message() const;
};

struct LegalityReport {
    bool ok = true;
    std::vector<Violation> violations;
};

LegalityReport is_legal(const Scene& s);
bool goal_reached(const Scene& s);

// Named sub-shapes of a piece: "<id>" or "<id>.pole" / "<id>.circle" for lollipops.
struct PiecePart {
    std::string name;
    std::optional<SegmentT> segment;
    std::optional<CircleT> circle;
};
std::vector<PiecePart> parts_of(const RigidPiece& p);

// Smallest distance from a rope's segments to the obstacles the rope must
// avoid (tube radii subtracted), honoring pinned-end plane exemptions.
double rope_segment_clearance(const Scene& s, const PolyRope& r, size_t edge, std::string* nearest = nullptr);
double piece_clearance(const Scene& s, const RigidPiece& p, std::string* nearest = nullptr);

// Convex-hull gap between two groups of piece/rope ids.
double group_gap(const Scene& s, const std::vector<std::string>& a, const std::vector<std::string>& b);

nlohmann::json to_json(const Scene& s);
Scene scene_from_json(const nlohmann::json& j);
std::string serialize(const Scene& s);  // canonical compact dump
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);
void save_scene(const Scene& s, const std::string& path);
std::string sha256_hex(const std::string& data);
std::string scene_hash(const Scene& s);

nlohmann::json vec_json(const Vec3& v);
Vec3 json_vec(const nlohmann::json& j);

bool operator==(const SegmentT& a, const SegmentT& b);
bool operator==(const CircleT& a, const CircleT& b);
bool operator==(const PlaneT& a, const PlaneT& b);
bool operator==(const RigidPiece& a, const RigidPiece& b);
bool operator==(const PolyRope& a, const PolyRope& b);
bool operator==(const Goal& a, const Goal& b);
bool operator==(const Scene& a, const Scene& b);

}  // namespace untangle
