#pragma once

#include <cstddef>
#include <vector>

#include "faceval/mesh.hpp"

namespace faceval {

struct NearestHit {
  std::size_t index = 0;
  double distance = 0.0;  // mm
};

// Balanced kD-tree over a fixed 3D point set. Queries are exact: results
// match brute-force nearest neighbor, with ties broken towards the smallest
// point index. Immutable after construction, safe for concurrent queries.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  NearestHit nearest(const Vec3& query) const;

  // Indices of all points with |p - query| <= radius, ascending.
  std::vector<std::size_t> within_radius(const Vec3& query, double radius) const;

 private:
  struct Node {
    std::size_t point = 0;    // index into points_
    int axis = 0;             // split dimension
    std::int32_t left = -1;   // node indices, -1 when absent
    std::int32_t right = -1;
  };

  std::int32_t build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end, int depth);
  void search_nearest(std::int32_t node, const Vec3& query, NearestHit& best, double& best_sq) const;
  void search_radius(std::int32_t node, const Vec3& query, double radius_sq,
                     std::vector<std::size_t>& hits) const;

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace faceval
