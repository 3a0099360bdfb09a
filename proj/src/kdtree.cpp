#include "faceval/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "faceval/error.hpp"

namespace faceval {

SpatialIndex::SpatialIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(Errc::empty_point_set, "cannot index an empty point set");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite())
      throw Error(Errc::non_numeric_coordinate, "point " + std::to_string(i) + " is not finite");
  }

  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(order, 0, points_.size(), 0);
}

std::int32_t SpatialIndex::build(std::vector<std::size_t>& order, std::size_t begin, std::size_t end, int depth) {
  if (begin >= end) return -1;

  const int axis = depth % 3;
  const std::size_t mid = begin + (end - begin) / 2;
  // Tie-break on index so the tree layout is a pure function of input order.
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     const double ca = points_[a][axis];
                     const double cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({order[mid], axis, -1, -1});
  const std::int32_t left = build(order, begin, mid, depth + 1);
  const std::int32_t right = build(order, mid + 1, end, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

NearestHit SpatialIndex::nearest(const Vec3& query) const {
  NearestHit best;
  double best_sq = std::numeric_limits<double>::infinity();
  best.index = points_.size();  // sentinel, replaced on first visit
  search_nearest(root_, query, best, best_sq);
  best.distance = std::sqrt(best_sq);
  return best;
}

void SpatialIndex::search_nearest(std::int32_t node_id, const Vec3& query, NearestHit& best, double& best_sq) const {
  if (node_id < 0) return;
  const Node& node = nodes_[node_id];
  const Vec3& p = points_[node.point];

  const double d_sq = (p - query).squaredNorm();
  if (d_sq < best_sq || (d_sq == best_sq && node.point < best.index)) {
    best_sq = d_sq;
    best.index = node.point;
  }

  const double delta = query[node.axis] - p[node.axis];
  const std::int32_t near_side = delta < 0 ? node.left : node.right;
  const std::int32_t far_side = delta < 0 ? node.right : node.left;

  search_nearest(near_side, query, best, best_sq);
  // The far half-space can still hold an equal-distance, lower-index point.
  if (delta * delta <= best_sq) search_nearest(far_side, query, best, best_sq);
}

std::vector<std::size_t> SpatialIndex::within_radius(const Vec3& query, double radius) const {
  std::vector<std::size_t> hits;
  if (radius < 0) return hits;
  search_radius(root_, query, radius * radius, hits);
  std::sort(hits.begin(), hits.end());
  return hits;
}

void SpatialIndex::search_radius(std::int32_t node_id, const Vec3& query, double radius_sq,
                                 std::vector<std::size_t>& hits) const {
  if (node_id < 0) return;
  const Node& node = nodes_[node_id];
  const Vec3& p = points_[node.point];

  if ((p - query).squaredNorm() <= radius_sq) hits.push_back(node.point);

  const double delta = query[node.axis] - p[node.axis];
  const std::int32_t near_side = delta < 0 ? node.left : node.right;
  const std::int32_t far_side = delta < 0 ? node.right : node.left;

  search_radius(near_side, query, radius_sq, hits);
  if (delta * delta <= radius_sq) search_radius(far_side, query, radius_sq, hits);
}

}  // namespace faceval
