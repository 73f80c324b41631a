#pragma once

#include <string>
#include <variant>
#include <vector>

#include "untangle/scene.hpp"

namespace untangle {

struct MoveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllegalMove : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DeltaMove {
    std::string rope;
    size_t edge = 0;
    Vec3 apex;
    bool operator==(const DeltaMove&) const = default;
};

struct InverseDelta {
    std::string rope;
    size_t vertex = 0;
    bool operator==(const InverseDelta&) const = default;
};

// Rotation about the piece's reference point, then translation.
struct RigidStep {
    std::string piece;
    Vec3 axis{0, 0, 1};
    double angle = 0;
    Vec3 translation;
    bool operator==(const RigidStep&) const = default;
};

using Move = std::variant<DeltaMove, InverseDelta, RigidStep>;

struct MoveCheck {
    bool ok = true;
    std::vector<Violation> violations;
    std::string message() const;
};

MoveCheck validate_delta(const Scene& s, const DeltaMove& m);
MoveCheck validate_inverse(const Scene& s, const InverseDelta& m);
MoveCheck validate_rigid_step(const Scene& s, const RigidStep& m);
MoveCheck validate_move(const Scene& s, const Move& m);

// Largest displacement of any point of the piece under the step.
double step_displacement(const RigidPiece& p, const RigidStep& m);
RigidPiece posed(const RigidPiece& p, const RigidStep& m);

// Throws IllegalMove when validation fails, MoveError on bad indices.
Scene apply_move(const Scene& s, const Move& m);
// No validation; for tests and replay diagnostics.
Scene apply_unchecked(const Scene& s, const Move& m);

struct Discretization {
    double pitch = 0.1;
    double ball = 0.5;
    bool rigid = true;
};

// Apex offsets from an edge midpoint: grid points within the ball, origin
// excluded, in lexicographic order.
std::vector<Vec3> apex_offsets(const Discretization& d);
// False when the apex is collinear with the edge.
bool apex_usable(const SegmentT& seg, const Vec3& apex);

std::vector<RigidStep> rigid_step_set(const Scene& s, const RigidPiece& p);
// All candidates in deterministic order (rope id, edge, lexicographic apex;
// then inverse deltas; then rigid steps by piece id), before validation.
std::vector<Move> candidate_moves(const Scene& s, const Discretization& d);
std::vector<Move> enumerate_moves(const Scene& s, const Discretization& d);

struct MoveScript {
    int version = 1;
    std::string scene_hash;
    std::vector<Move> moves;
};

nlohmann::json move_json(const Move& m);
Move json_move(const nlohmann::json& j);
nlohmann::json to_json(const MoveScript& s);
MoveScript script_from_json(const nlohmann::json& j);
MoveScript load_script(const std::string& path);
void save_script(const MoveScript& s, const std::string& path);

}  // namespace untangle
