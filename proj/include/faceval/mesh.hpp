#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace faceval {

using Vec3 = Eigen::Vector3d;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Indexed triangle surface. Coordinates are millimetres, stored as doubles
// regardless of the precision they were read from.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  std::vector<Rgb> vertex_colors;    // empty or vertices.size()
  std::vector<Vec3> vertex_normals;  // empty or vertices.size()

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  bool has_colors() const { return !vertex_colors.empty(); }
  bool has_normals() const { return !vertex_normals.empty(); }
};

bool operator==(const TriangleMesh& a, const TriangleMesh& b);

struct Finding {
  std::string code;
  std::string message;
};

// empty errors <=> mesh accepted by downstream operations
struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
};

// Errors: NaN/inf coordinates, face indices out of range, color/normal length
// mismatches. Warnings: zero-area faces, unreferenced vertices.
ValidationReport validate_mesh(const TriangleMesh& mesh);

}  // namespace faceval
