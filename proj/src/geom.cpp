#include "faceval/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "faceval/error.hpp"
#include "faceval/numeric.hpp"

namespace faceval {
namespace {

double point_to_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

DistanceStats make_distance_stats(std::vector<double> per_point) {
  if (per_point.empty()) throw Error(Errc::empty_point_set, "no distances to aggregate");
  DistanceStats stats;
  stats.per_point = std::move(per_point);
  const MeanSd ms = mean_sd(stats.per_point);
  stats.mean = ms.mean;
  stats.sd = ms.sd;
  stats.max = *std::max_element(stats.per_point.begin(), stats.per_point.end());
  return stats;
}

DistanceStats point_to_point_stats(const TriangleMesh& source, const TriangleMesh& target) {
  if (source.vertices.empty() || target.vertices.empty())
    throw Error(Errc::empty_point_set, "point-to-point needs non-empty meshes");

  const SpatialIndex index(target.vertices);
  std::vector<double> distances;
  distances.reserve(source.vertices.size());
  for (const Vec3& v : source.vertices) distances.push_back(index.nearest(v).distance);
  return make_distance_stats(std::move(distances));
}

// Closest-point-on-triangle via barycentric region tests (Ericson 2005).
double point_to_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;

  // Degenerate triangle: treat as its three edges.
  const double doubled_area_sq = ab.cross(ac).squaredNorm();
  if (doubled_area_sq <= 1e-30 * ab.squaredNorm() * ac.squaredNorm()) {
    return std::min({point_to_segment_distance(p, a, b), point_to_segment_distance(p, b, c),
                     point_to_segment_distance(p, a, c)});
  }

  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).norm();
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).norm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return (p - (a + v * ab + w * ac)).norm();
}

DeviationField surface_deviation(const TriangleMesh& source, const TriangleMesh& target) {
  if (target.faces.empty()) throw Error(Errc::no_faces, "target mesh has no faces");
  if (source.vertices.empty()) throw Error(Errc::empty_point_set, "source mesh has no vertices");

  const std::size_t face_count = target.faces.size();
  std::vector<Vec3> centroids(face_count);
  std::vector<double> bound_radius(face_count);
  double max_bound = 0.0;
  for (std::size_t f = 0; f < face_count; ++f) {
    const Vec3& a = target.vertices[target.faces[f][0]];
    const Vec3& b = target.vertices[target.faces[f][1]];
    const Vec3& c = target.vertices[target.faces[f][2]];
    centroids[f] = (a + b + c) / 3.0;
    bound_radius[f] = std::sqrt(std::max({(a - centroids[f]).squaredNorm(), (b - centroids[f]).squaredNorm(),
                                          (c - centroids[f]).squaredNorm()}));
    max_bound = std::max(max_bound, bound_radius[f]);
  }

  const SpatialIndex centroid_index(centroids);

  DeviationField field;
  field.per_vertex.reserve(source.vertices.size());
  for (const Vec3& p : source.vertices) {
    const NearestHit seed = centroid_index.nearest(p);
    const auto& seed_face = target.faces[seed.index];
    double best = point_to_triangle_distance(p, target.vertices[seed_face[0]], target.vertices[seed_face[1]],
                                             target.vertices[seed_face[2]]);

    // Any triangle beating `best` has its centroid within best + r_max:
    // |p - q| >= |p - centroid| - r_tri. Small slack absorbs rounding.
    const double radius = (best + max_bound) * (1.0 + 1e-12) + 1e-12;
    for (std::size_t f : centroid_index.within_radius(p, radius)) {
      const auto& face = target.faces[f];
      const double d = point_to_triangle_distance(p, target.vertices[face[0]], target.vertices[face[1]],
                                                  target.vertices[face[2]]);
      best = std::min(best, d);
    }
    field.per_vertex.push_back(best);
  }
  return field;
}

TriangleMesh colorize_deviation(const TriangleMesh& mesh, const DeviationField& field, std::optional<double> cap) {
  if (field.per_vertex.size() != mesh.vertices.size())
    throw Error(Errc::length_mismatch, "deviation field length " + std::to_string(field.per_vertex.size()) +
                                           " does not match " + std::to_string(mesh.vertices.size()) + " vertices");

  const double cap_value = cap.has_value() ? *cap : quantile(field.per_vertex, 0.95);

  TriangleMesh colored = mesh;
  colored.vertex_colors.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const double t = cap_value > 0.0 ? std::clamp(field.per_vertex[i] / cap_value, 0.0, 1.0) : 0.0;
    colored.vertex_colors[i] = {static_cast<std::uint8_t>(std::lround(255.0 * t)), 0,
                                static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)))};
  }
  return colored;
}

TriangleMesh crop_sphere(const TriangleMesh& mesh, const Vec3& center, double radius) {
  if (radius <= 0.0) throw Error(Errc::empty_result, "crop radius must be positive");

  const double radius_sq = radius * radius;
  std::vector<bool> inside(mesh.vertices.size());
  std::size_t inside_count = 0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    inside[i] = (mesh.vertices[i] - center).squaredNorm() <= radius_sq;
    inside_count += inside[i] ? 1 : 0;
  }
  if (inside_count == 0) throw Error(Errc::empty_result, "no vertex within the crop sphere");

  std::vector<std::array<std::uint32_t, 3>> kept_faces;
  kept_faces.reserve(mesh.faces.size());
  for (const auto& face : mesh.faces) {
    if (inside[face[0]] && inside[face[1]] && inside[face[2]]) kept_faces.push_back(face);
  }

  // With faces present, only vertices still referenced survive; a pure point
  // cloud keeps every in-radius vertex.
  std::vector<bool> keep = inside;
  if (!mesh.faces.empty()) {
    keep.assign(mesh.vertices.size(), false);
    for (const auto& face : kept_faces)
      for (std::uint32_t idx : face) keep[idx] = true;
  }

  TriangleMesh out;
  std::vector<std::uint32_t> remap(mesh.vertices.size(), 0);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.push_back(mesh.vertices[i]);
    if (mesh.has_colors()) out.vertex_colors.push_back(mesh.vertex_colors[i]);
    if (mesh.has_normals()) out.vertex_normals.push_back(mesh.vertex_normals[i]);
  }
  if (out.vertices.empty()) throw Error(Errc::empty_result, "crop removed every vertex");

  out.faces.reserve(kept_faces.size());
  for (const auto& face : kept_faces) out.faces.push_back({remap[face[0]], remap[face[1]], remap[face[2]]});
  return out;
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.rotation = rotation.transpose();
  inv.scale = 1.0 / scale;
  inv.translation = -(inv.scale * (inv.rotation * translation));
  return inv;
}

SimilarityTransform similarity_align(const LandmarkSet& source, const LandmarkSet& target, bool allow_scale) {
  check_landmark_set(source);
  check_landmark_set(target);
  if (source.names != target.names)
    throw Error(Errc::name_mismatch, "source and target landmark name sequences differ");

  const auto n = static_cast<Eigen::Index>(source.size());
  Eigen::MatrixXd x(n, 3), y(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = source.points[static_cast<std::size_t>(i)];
    y.row(i) = target.points[static_cast<std::size_t>(i)];
  }

  const Eigen::RowVector3d mu_x = x.colwise().mean();
  const Eigen::RowVector3d mu_y = y.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - mu_x;
  const Eigen::MatrixXd yc = y.rowwise() - mu_y;

  for (const Eigen::MatrixXd& centered : {xc, yc}) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> rank_svd(centered);
    const auto& sv = rank_svd.singularValues();
    if (sv(0) == 0.0 || sv(1) <= 1e-12 * sv(0))
      throw Error(Errc::degenerate_configuration, "landmarks are collinear or coincident");
  }

  // Umeyama (1991): closed-form similarity with the reflection guard.
  const Eigen::Matrix3d sigma = yc.transpose() * xc / static_cast<double>(n);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d signs = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) signs(2) = -1.0;

  SimilarityTransform t;
  t.rotation = svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
  if (allow_scale) {
    const double var_x = xc.squaredNorm() / static_cast<double>(n);
    t.scale = svd.singularValues().dot(signs) / var_x;
    if (t.scale <= 0.0) throw Error(Errc::degenerate_configuration, "recovered scale is not positive");
  }
  t.translation = mu_y.transpose() - t.scale * (t.rotation * mu_x.transpose());

  // A fit that is identity to machine precision becomes the exact identity,
  // so already-aligned data passes through bit-unchanged.
  const double centroid_scale = 1.0 + mu_y.norm();
  if ((t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12 && std::abs(t.scale - 1.0) < 1e-12 &&
      t.translation.norm() < 1e-10 * centroid_scale) {
    return SimilarityTransform{};
  }
  return t;
}

TriangleMesh apply_transform(const TriangleMesh& mesh, const SimilarityTransform& t) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = t.apply(v);
  for (Vec3& n : out.vertex_normals) n = t.rotation * n;
  return out;
}

LandmarkSet apply_transform(const LandmarkSet& set, const SimilarityTransform& t) {
  LandmarkSet out = set;
  for (Vec3& p : out.points) p = t.apply(p);
  return out;
}

}  // namespace faceval
