#pragma once

#include <string>

#include "faceval/mesh.hpp"

namespace faceval {

enum class PlyFormat { ascii, binary_little_endian };

// Reads a PLY 1.0 file (ascii or binary_little_endian). The vertex element
// must declare numeric x, y, z; optional nx/ny/nz and red/green/blue are
// captured, everything else is skipped. Faces must be triangles.
TriangleMesh read_ply(const std::string& path);

// Binary output stores coordinates as float64, so a write/read cycle is
// bit-exact. ASCII output uses 17 significant digits.
void write_ply(const TriangleMesh& mesh, const std::string& path, PlyFormat format);

}  // namespace faceval
