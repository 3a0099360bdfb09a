#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "faceval/kdtree.hpp"
#include "faceval/landmarks.hpp"
#include "faceval/mesh.hpp"

namespace faceval {

// Per-source-vertex distances with the Table-style aggregates. `sd` is the
// sample standard deviation.
struct DistanceStats {
  std::vector<double> per_point;  // mm, source vertex order
  double mean = 0.0;
  double sd = 0.0;
  double max = 0.0;
};

DistanceStats make_distance_stats(std::vector<double> per_point);

// Distance from each source vertex to the nearest target vertex (vertex
// densities differ between acquisition methods, hence nearest-neighbor).
DistanceStats point_to_point_stats(const TriangleMesh& source, const TriangleMesh& target);

// Exact Euclidean distance to the closest point on the triangle. Degenerate
// triangles fall back to point-to-segment/point distance.
double point_to_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Non-negative point-to-surface distances aligned with a mesh's vertices.
struct DeviationField {
  std::vector<double> per_vertex;  // mm
};

// Distance from each source vertex to the closest point on the target
// surface. Candidate triangles come from a centroid index with a verified
// radius expansion, so the result equals the minimum over all triangles.
DeviationField surface_deviation(const TriangleMesh& source, const TriangleMesh& target);

// Vertex colors on a linear blue-to-red map, clamped at `cap`
// (default: 95th percentile of the field).
TriangleMesh colorize_deviation(const TriangleMesh& mesh, const DeviationField& field,
                                std::optional<double> cap = std::nullopt);

// Keeps vertices within `radius` of `center`, drops faces that reference a
// removed vertex, then drops vertices left unreferenced (point clouds keep
// all in-radius vertices) and reindexes.
TriangleMesh crop_sphere(const TriangleMesh& mesh, const Vec3& center, double radius);

// x -> scale * rotation * x + translation, rotation proper (det = +1).
struct SimilarityTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return scale * (rotation * x) + translation; }
  SimilarityTransform inverse() const;
};

// Least-squares similarity (rigid when allow_scale is false) mapping source
// landmarks onto target landmarks; reflections excluded.
SimilarityTransform similarity_align(const LandmarkSet& source, const LandmarkSet& target, bool allow_scale = true);

TriangleMesh apply_transform(const TriangleMesh& mesh, const SimilarityTransform& t);
LandmarkSet apply_transform(const LandmarkSet& set, const SimilarityTransform& t);

}  // namespace faceval
