#include "faceval/mesh.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace faceval {

bool operator==(const TriangleMesh& a, const TriangleMesh& b) {
  if (a.faces != b.faces) return false;
  if (a.vertex_colors != b.vertex_colors) return false;
  if (a.vertices.size() != b.vertices.size()) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i)
    if (a.vertices[i] != b.vertices[i]) return false;
  if (a.vertex_normals.size() != b.vertex_normals.size()) return false;
  for (std::size_t i = 0; i < a.vertex_normals.size(); ++i)
    if (a.vertex_normals[i] != b.vertex_normals[i]) return false;
  return true;
}

ValidationReport validate_mesh(const TriangleMesh& mesh) {
  ValidationReport report;

  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!mesh.vertices[i].allFinite()) {
      report.errors.push_back(
          {"non_finite_vertex", "vertex " + std::to_string(i) + " has a NaN or infinite coordinate"});
    }
  }

  const auto n = static_cast<std::uint32_t>(mesh.vertices.size());
  std::vector<bool> referenced(mesh.vertices.size(), false);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    bool in_range = true;
    for (std::uint32_t idx : face) {
      if (idx >= n) {
        report.errors.push_back({"face_index_out_of_range",
                                 "face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                                     " of " + std::to_string(n)});
        in_range = false;
      }
    }
    if (!in_range) continue;
    for (std::uint32_t idx : face) referenced[idx] = true;

    const Vec3& a = mesh.vertices[face[0]];
    const Vec3& b = mesh.vertices[face[1]];
    const Vec3& c = mesh.vertices[face[2]];
    if (a.allFinite() && b.allFinite() && c.allFinite()) {
      const double doubled_area = (b - a).cross(c - a).norm();
      if (doubled_area == 0.0) {
        report.warnings.push_back({"degenerate_face", "face " + std::to_string(f) + " has zero area"});
      }
    }
  }

  if (!mesh.vertex_colors.empty() && mesh.vertex_colors.size() != mesh.vertices.size()) {
    report.errors.push_back({"color_length_mismatch",
                             std::to_string(mesh.vertex_colors.size()) + " colors for " +
                                 std::to_string(mesh.vertices.size()) + " vertices"});
  }
  if (!mesh.vertex_normals.empty() && mesh.vertex_normals.size() != mesh.vertices.size()) {
    report.errors.push_back({"normal_length_mismatch",
                             std::to_string(mesh.vertex_normals.size()) + " normals for " +
                                 std::to_string(mesh.vertices.size()) + " vertices"});
  }

  if (!mesh.faces.empty()) {
    for (std::size_t i = 0; i < referenced.size(); ++i) {
      if (!referenced[i]) {
        report.warnings.push_back({"unreferenced_vertex", "vertex " + std::to_string(i) + " is not used by any face"});
      }
    }
  }

  return report;
}

}  // namespace faceval
