#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "untangle/scene.hpp"

namespace untangle {

struct ExportOptions {
    std::optional<Vec3> direction;  // unset: a fixed oblique view
    bool auto_retry = true;         // try random directions when the projection is not generic
    uint64_t seed = 0;
    int retries = 100;
    double width = 800;             // SVG canvas width in px
    double rope_radius = 0.01;      // OBJ tube radius for ropes
    int tube_sides = 12;
};

// Orthogonal projection with gaps in the under-strand at every crossing.
// Throws GenericityError when no usable direction is found.
std::string export_svg(const Scene& s, const ExportOptions& opt = {});

// One group per piece and rope: torus meshes for solid hoops, tube meshes for
// ropes, polylines for wires and poles.
std::string export_obj(const Scene& s, const ExportOptions& opt = {});

}  // namespace untangle
